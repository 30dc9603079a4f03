//! Small SVG drawings of Kripke structures. States are laid out in columns
//! by breadth-first distance from the initial state; unreachable states get
//! a final column of their own.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use ksmin::kripke::fmt_label;
use ksmin::{KripkeStructure, StateId};

const PALETTE: [&str; 10] = [
    "#8ecae6", "#ffb703", "#b5e48c", "#f4978e", "#cdb4db", "#ffd6a5", "#90e0ef", "#d4a373", "#a3b18a", "#f7aef8",
];
const COL: f64 = 130.0;
const ROW: f64 = 80.0;
const R: f64 = 20.0;
const MARGIN: f64 = 45.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Column and row of every state.
fn layout(ks: &KripkeStructure) -> Vec<(usize, usize)> {
    let n = ks.num_states();
    let mut depth = vec![usize::MAX; n];
    let mut queue = VecDeque::from([ks.initial()]);
    depth[ks.initial().0] = 0;
    while let Some(s) = queue.pop_front() {
        for &t in ks.successors(s) {
            if depth[t.0] == usize::MAX {
                depth[t.0] = depth[s.0] + 1;
                queue.push_back(t);
            }
        }
    }
    let last = depth.iter().filter(|&&d| d != usize::MAX).max().map_or(0, |d| d + 1);
    let mut rows: HashMap<usize, usize> = HashMap::new();
    (0..n)
        .map(|i| {
            let col = if depth[i] == usize::MAX { last } else { depth[i] };
            let row = rows.entry(col).or_insert(0);
            *row += 1;
            (col, *row - 1)
        })
        .collect()
}

/// Draws `ks`; `block` picks a fill color per state name.
pub fn render(ks: &KripkeStructure, block: &dyn Fn(&str) -> Option<usize>) -> String {
    let pos = layout(ks);
    let cols = pos.iter().map(|p| p.0).max().unwrap_or(0) + 1;
    let rows = pos.iter().map(|p| p.1).max().unwrap_or(0) + 1;
    let (w, h) = (2.0 * MARGIN + (cols - 1) as f64 * COL, 2.0 * MARGIN + (rows - 1) as f64 * ROW + 20.0);
    let xy = |s: StateId| {
        let (c, r) = pos[s.0];
        (MARGIN + c as f64 * COL, MARGIN + r as f64 * ROW)
    };

    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    out.push_str(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="#444"/></marker></defs>"##,
    );

    for (a, b) in ks.edges() {
        let (x1, y1) = xy(a);
        if a == b {
            let _ = write!(
                out,
                r##"<path d="M{:.1},{:.1} C{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="none" stroke="#444" marker-end="url(#arrow)"/>"##,
                x1 - 8.0,
                y1 - R + 2.0,
                x1 - 25.0,
                y1 - R - 30.0,
                x1 + 25.0,
                y1 - R - 30.0,
                x1 + 8.0,
                y1 - R + 2.0
            );
            continue;
        }
        let (x2, y2) = xy(b);
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = (dx / len, dy / len);
        // bend every edge a little to the left so opposite edges separate
        let bend = 18.0;
        let (mx, my) = ((x1 + x2) / 2.0 - uy * bend, (y1 + y2) / 2.0 + ux * bend);
        let start = towards(x1, y1, mx, my, R);
        let end = towards(x2, y2, mx, my, R);
        let _ = write!(
            out,
            r##"<path d="M{:.1},{:.1} Q{:.1},{:.1} {:.1},{:.1}" fill="none" stroke="#444" marker-end="url(#arrow)"/>"##,
            start.0, start.1, mx, my, end.0, end.1
        );
    }

    for s in ks.states() {
        let (x, y) = xy(s);
        let fill = block(ks.name(s)).map_or("#eeeeee", |b| PALETTE[b % PALETTE.len()]);
        let stroke = if s == ks.initial() { 3 } else { 1 };
        let _ = write!(
            out,
            r##"<g><title>{name} {label}</title><circle cx="{x}" cy="{y}" r="{R}" fill="{fill}" stroke="#222" stroke-width="{stroke}"/><text x="{x}" y="{ty}" text-anchor="middle">{short}</text><text x="{x}" y="{ly}" text-anchor="middle" fill="#555">{label}</text></g>"##,
            name = escape(ks.name(s)),
            label = escape(&fmt_label(ks.label(s))),
            short = escape(&shorten(ks.name(s))),
            ty = y + 4.0,
            ly = y + R + 13.0,
        );
    }
    out.push_str("</svg>");
    out
}

/// Point at distance `r` from `(x, y)` in the direction of `(tx, ty)`.
fn towards(x: f64, y: f64, tx: f64, ty: f64, r: f64) -> (f64, f64) {
    let (dx, dy) = (tx - x, ty - y);
    let len = (dx * dx + dy * dy).sqrt().max(1e-9);
    (x + dx / len * r, y + dy / len * r)
}

fn shorten(name: &str) -> String {
    if name.chars().count() <= 6 {
        name.to_string()
    } else {
        name.chars().take(5).chain(['…']).collect()
    }
}

import init, { example, generate, minimize, equivalent } from "./pkg/ksmin_web.js";

const $ = (id) => document.getElementById(id);
let lastQuotient = "";

function guarded(action) {
  return () => {
    $("error").textContent = "";
    try {
      action();
    } catch (e) {
      $("error").textContent = e.message ?? String(e);
    }
  };
}

function runMinimize() {
  const r = JSON.parse(minimize($("ks").value, $("mode").value, $("strategy").value));
  $("summary").textContent = `${r.states} states, ${r.blockCount} blocks: ` +
    r.blocks.map((b) => `{${b.join(" ")}}`).join(" ");
  $("original").innerHTML = r.originalSvg;
  $("quotient").innerHTML = r.quotientSvg;
  $("quotientText").textContent = r.quotient;
  lastQuotient = r.quotient;
}

function runCompare() {
  const r = JSON.parse(equivalent($("ks").value, $("other").value, $("semantics").value));
  $("verdict").textContent = r.equivalent ? "equivalent" : `not equivalent: ${r.witness}`;
}

await init();

$("load").onclick = guarded(() => {
  $("ks").value = example($("example").value);
  runMinimize();
});
$("generate").onclick = guarded(() => {
  $("ks").value = generate(+$("states").value, +$("aps").value, +$("density").value, +$("seed").value);
  runMinimize();
});
$("minimize").onclick = guarded(runMinimize);
$("compare").onclick = guarded(runCompare);
$("useQuotient").onclick = guarded(() => {
  $("other").value = lastQuotient;
  runCompare();
});

$("ks").value = example("fig2");
$("other").value = example("fig3");
guarded(runMinimize)();

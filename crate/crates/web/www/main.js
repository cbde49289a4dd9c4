import init, { triangle_rows, factorize, guess } from "./pkg/seqguess_web.js";

const TRIANGLES = ["S1", "S1signed", "S2", "E1", "E2", "Binom", "Binom2", "BinomSym"];
const $ = (id) => document.getElementById(id);

function run(out, f) {
  out.classList.remove("error");
  try {
    f();
  } catch (e) {
    out.classList.add("error");
    out.textContent = e.message ?? String(e);
  }
}

function showRows() {
  const out = $("tri-out");
  run(out, () => {
    const { rows } = JSON.parse(triangle_rows($("tri-id").value, Number($("tri-rows").value)));
    const table = document.createElement("table");
    rows.forEach((row, n) => {
      const tr = table.insertRow();
      tr.insertCell().textContent = `n=${n}`;
      row.forEach((v) => (tr.insertCell().textContent = v));
    });
    out.replaceChildren(table);
  });
}

function showFactors() {
  const out = $("fac-out");
  run(out, () => {
    const r = JSON.parse(factorize($("fac-value").value, $("fac-ids").value, Number($("fac-rows").value)));
    const lines = r.decompositions.map((d) =>
      d.factors.map((f) => `${f.triangle}[${f.n}, ${f.k}]=${f.value}`).join(" * ") + ` * ${d.remainder}`
    );
    out.textContent = `${lines.length} decompositions of ${r.value}\n` + lines.join("\n");
  });
}

function showGuess() {
  const out = $("g-out");
  out.textContent = "searching...";
  // let the status paint before the synchronous search
  setTimeout(() =>
    run(out, () => {
      const r = JSON.parse(
        guess($("g-polys").value, $("g-var").value, BigInt($("g-start").value), $("g-ids").value, Number($("g-rows").value))
      );
      const lines = r.formulas.length ? r.formulas : ["no formula found"];
      out.textContent = lines.concat(r.warnings.map((w) => `warning: ${w}`)).join("\n");
    })
  );
}

await init();
for (const t of TRIANGLES) $("tri-id").add(new Option(t, t));
$("tri-go").onclick = showRows;
$("fac-go").onclick = showFactors;
$("g-go").onclick = showGuess;
showRows();

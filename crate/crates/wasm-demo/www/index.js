import init, { sensitivityPoint, gainHeatmap, optimizeXi } from "./pkg/gaussint_wasm.js";

const $ = (id) => document.getElementById(id);
const val = (id) => parseFloat($(id).value);

function echo(root) {
  for (const out of root.querySelectorAll("output")) {
    out.value = $(out.htmlFor).value;
  }
}

function table(el, rows) {
  el.replaceChildren(
    ...rows.map(([k, v]) => {
      const tr = document.createElement("tr");
      const a = document.createElement("td");
      const b = document.createElement("td");
      a.textContent = k;
      b.textContent = typeof v === "number" ? v.toPrecision(7) : v;
      tr.append(a, b);
      return tr;
    }),
  );
}

function fail(el, e) {
  el.replaceChildren();
  const tr = el.insertRow();
  const td = tr.insertCell();
  td.className = "err";
  td.textContent = String(e.message ?? e);
}

function updatePoint() {
  echo($("point"));
  const a = val("p-alpha");
  try {
    const [mean, variance, dphi, nbar, gain] = sensitivityPoint(
      a, val("p-r"), val("p-xi"), val("p-ta"), val("p-tb"), val("p-ga"), val("p-gb"), val("p-phi"),
    );
    table($("p-result"), [
      ["⟨J3⟩", mean],
      ["Var J3", variance],
      ["Δφ", dphi],
      ["n̄", nbar],
      ["G = (1/n̄)/Δφ²", gain],
    ]);
  } catch (e) {
    fail($("p-result"), e);
  }
}

function colour(g, gmax) {
  if (!(g >= 1)) return [200, 200, 200];
  const x = Math.min(1, Math.log(g) / Math.log(gmax));
  // dark blue to yellow
  return [Math.round(255 * x), Math.round(40 + 200 * x), Math.round(140 * (1 - x))];
}

function updateHeat() {
  echo($("heat"));
  $("h-xi").disabled = $("h-opt").checked;
  const canvas = $("h-canvas");
  const ctx = canvas.getContext("2d");
  const nt = 96;
  const ng = 72;
  let h;
  try {
    h = gainHeatmap($("h-mode").value === "symmetric", val("h-r"), val("h-xi"), $("h-opt").checked, nt, val("h-gmax"), ng);
  } catch (e) {
    $("h-info").textContent = String(e.message ?? e);
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  const gain = h.gain;
  const tv = h.tValues;
  const gv = h.gammaValues;
  const gmax = Math.max(1.0001, ...gain);
  const img = ctx.createImageData(nt, ng);
  // T runs left to right, gamma bottom to top.
  for (let ig = 0; ig < ng; ig++) {
    for (let it = 0; it < nt; it++) {
      const [r, g, b] = colour(gain[ig * nt + it], gmax);
      const k = 4 * ((ng - 1 - ig) * nt + it);
      img.data.set([r, g, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(nt, ng);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);

  const bx = h.boundaryT;
  const by = h.boundaryGamma;
  const x = (t) => ((t - tv[0]) / (tv[tv.length - 1] - tv[0])) * canvas.width;
  const y = (g) => canvas.height - (g / gv[gv.length - 1]) * canvas.height;
  ctx.strokeStyle = "#fff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  bx.forEach((t, i) => (i ? ctx.lineTo(x(t), y(by[i])) : ctx.moveTo(x(t), y(by[i]))));
  ctx.stroke();
  $("h-info").textContent =
    `max G = ${gmax.toPrecision(4)}; ` + (bx.length ? `T* at γ̄ = 0: ${bx[0].toFixed(4)}` : "no G = 1 crossing");
  h.free();
}

function updateOpt() {
  echo($("opt"));
  try {
    const [xi, g, g0] = optimizeXi($("o-mode").value === "symmetric", val("o-t"), val("o-g"), val("o-r"));
    table($("o-result"), [
      ["ξ*", xi],
      ["G(ξ*)", g],
      ["G(ξ = 0)", g0],
    ]);
  } catch (e) {
    fail($("o-result"), e);
  }
}

await init();
for (const [section, fn] of [["point", updatePoint], ["heat", updateHeat], ["opt", updateOpt]]) {
  $(section).addEventListener("input", fn);
  fn();
}

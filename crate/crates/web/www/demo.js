import init, { corpus_names, corpus_layout, los_area, plan, verify } from "./pkg/losplan_web.js";

const TIER_COLORS = { primary: "#d62728", secondary: "#1f77b4", trinary: "#2ca02c" };
const AREA_COLORS = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1"];

const canvas = document.getElementById("view");
const ctx = canvas.getContext("2d");
const status = document.getElementById("status");
const $ = (id) => document.getElementById(id);

const state = { layoutJson: "", layout: null, deployment: null, areas: [], samples: [], sight: null };

function frame() {
  const pts = [state.layout.outer, ...state.layout.holes].flat();
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const minX = Math.min(...xs), maxX = Math.max(...xs), minY = Math.min(...ys), maxY = Math.max(...ys);
  const pad = 12;
  const scale = (canvas.width - 2 * pad) / Math.max(maxX - minX, maxY - minY);
  return {
    toCanvas: ([x, y]) => [pad + (x - minX) * scale, pad + (maxY - y) * scale],
    toWorld: (cx, cy) => [minX + (cx - pad) / scale, maxY - (cy - pad) / scale],
  };
}

function tracePath(f, rings) {
  ctx.beginPath();
  for (const ring of rings) {
    ring.forEach((p, i) => {
      const [x, y] = f.toCanvas(p);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.closePath();
  }
}

function draw() {
  const f = frame();
  const rings = [state.layout.outer, ...state.layout.holes];
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  tracePath(f, rings);
  ctx.fillStyle = "#f7f7f7";
  ctx.fill("evenodd");

  ctx.globalAlpha = 0.3;
  state.areas.forEach((area, k) => {
    tracePath(f, area);
    ctx.fillStyle = AREA_COLORS[k % AREA_COLORS.length];
    ctx.fill("evenodd");
  });
  if (state.sight) {
    tracePath(f, state.sight.rings);
    ctx.fillStyle = "#ffbf00";
    ctx.fill("evenodd");
  }
  ctx.globalAlpha = 1;

  for (const [x, y, covered] of state.samples) {
    const [cx, cy] = f.toCanvas([x, y]);
    ctx.fillStyle = covered ? "#59a14f" : "#e15759";
    ctx.fillRect(cx - 1, cy - 1, 2, 2);
  }

  tracePath(f, rings);
  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  ctx.stroke();

  for (const prn of state.deployment?.prns ?? []) {
    const [cx, cy] = f.toCanvas([prn.x, prn.y]);
    ctx.beginPath();
    ctx.arc(cx, cy, 5, 0, 2 * Math.PI);
    ctx.fillStyle = TIER_COLORS[prn.tier];
    ctx.fill();
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 0.8;
    ctx.stroke();
  }
  if (state.sight) {
    const [cx, cy] = f.toCanvas(state.sight.from);
    ctx.fillStyle = "#000";
    ctx.fillRect(cx - 3, cy - 3, 6, 6);
  }
}

function loadLayout(name) {
  state.layoutJson = corpus_layout(name);
  state.layout = JSON.parse(state.layoutJson);
  state.layout.holes ??= [];
  state.deployment = null;
  state.areas = [];
  state.samples = [];
  state.sight = null;
  $("verify").disabled = true;
  status.textContent = "";
  draw();
}

// Let the status line repaint before a long synchronous call.
function busy(message, work) {
  status.textContent = message;
  setTimeout(() => {
    try {
      work();
    } catch (e) {
      status.textContent = `error: ${e}`;
    }
    draw();
  }, 20);
}

function rangeValue() {
  const r = Number($("r").value);
  return r > 0 ? r : null;
}

function onPlan() {
  const r = rangeValue();
  const config = {
    coverage_n: Number($("n").value),
    range_r: r,
    msd_ds: Number($("ds").value),
    msa_thetas: Number($("thetas").value),
    ht_R: r ?? Number($("ht").value),
  };
  busy("planning...", () => {
    const out = JSON.parse(plan(state.layoutJson, JSON.stringify(config)));
    state.deployment = out.deployment;
    state.areas = out.areas;
    state.samples = [];
    state.sight = null;
    const c = out.deployment.counts;
    status.textContent = `g=${c.g} g'=${c.g2} g''=${c.g3}, hidden set t=${c.hidden_t}, ` +
      `${out.deployment.prns.length} PRNs` +
      (out.deployment.lower_bound.provably_optimal ? " (provably optimal)" : "");
    $("verify").disabled = false;
  });
}

function onVerify() {
  busy("sampling...", () => {
    const out = JSON.parse(verify(state.layoutJson, JSON.stringify(state.deployment), Number($("samples").value), 1));
    state.samples = out.samples;
    status.textContent = `coverage ${(100 * out.coverage_fraction).toFixed(2)}%, ` +
      `${(100 * out.fraction_within_30_deg).toFixed(1)}% of samples within 30 deg of the ideal 90 deg EVA`;
  });
}

function onClick(ev) {
  const rect = canvas.getBoundingClientRect();
  const from = frame().toWorld(ev.clientX - rect.left, ev.clientY - rect.top);
  try {
    const out = JSON.parse(los_area(state.layoutJson, from[0], from[1], rangeValue() ?? 0));
    state.sight = { from, rings: out.rings };
    status.textContent = `line of sight from (${from[0].toFixed(2)}, ${from[1].toFixed(2)}): ${out.area.toFixed(2)} m^2`;
  } catch (e) {
    state.sight = null;
    status.textContent = `${e}`;
  }
  draw();
}

await init();
const select = $("layout");
for (const name of JSON.parse(corpus_names())) {
  select.add(new Option(name, name));
}
select.value = "replica";
select.addEventListener("change", () => loadLayout(select.value));
$("plan").addEventListener("click", onPlan);
$("verify").addEventListener("click", onVerify);
canvas.addEventListener("click", onClick);
loadLayout(select.value);

import init, { Explorer } from "./pkg/gdiagram_wasm.js";

const $ = (id) => document.getElementById(id);
let explorer = null;

const JOHNNY = `# Johnny, Mary and Bill. j, m and b are names for the entities J, M and B.
sort entity
const J M B : entity
func j : -> entity
func m : -> entity
func b : -> entity
equal j J
equal m M
equal b B

# the men are known exactly; walkers and talkers are partial
pred man : entity default false
pred walk : entity default unknown
pred talk : entity default unknown

fact man(J) = true
fact man(B) = true
fact walk(J) = true
fact walk(M) = true
fact talk(J) = true
fact talk(M) = unknown

family P = Pm:man Pw:walk
`;

function guard(f) {
  $("error").textContent = "";
  try {
    f();
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
  }
}

function showModel(text) {
  $("model").textContent = text;
}

function renderGrid() {
  const grid = JSON.parse(explorer.grid($("formula").value, $("mode").value));
  const table = $("grid");
  table.replaceChildren();
  const head = table.insertRow();
  head.appendChild(document.createElement("th"));
  for (const t of grid.times) {
    const th = document.createElement("th");
    th.textContent = t;
    head.appendChild(th);
  }
  grid.worlds.forEach((w, i) => {
    const row = table.insertRow();
    const th = document.createElement("th");
    th.textContent = w;
    row.appendChild(th);
    for (const v of grid.cells[i]) {
      const cell = row.insertCell();
      cell.textContent = v;
      cell.className = v;
    }
  });
}

$("load").onclick = () => guard(() => {
  explorer?.free();
  explorer = null;
  explorer = new Explorer($("theory").value, Number($("depth").value));
  showModel(explorer.report());
  $("grid").replaceChildren();
  $("result").textContent = "";
});

$("eval").onclick = () => guard(() => {
  $("result").textContent = explorer.eval($("formula").value, $("mode").value);
  renderGrid();
});

$("force").onclick = () => guard(() => {
  showModel(explorer.force($("assignment").value));
  $("eval").onclick();
});

$("undo").onclick = () => guard(() => {
  showModel(explorer.undo());
  $("eval").onclick();
});

await init();
$("theory").value = JOHNNY;
$("load").onclick();

"use strict";
(function () {
  var BLOCK_PREFIX = "cc-data-";

  function decodeBlock(name) {
    var el = document.getElementById(BLOCK_PREFIX + name);
    if (!el) return null;
    var text = el.textContent.trim();
    var colon = text.indexOf(":");
    var length = parseInt(text.slice(0, colon), 10);
    var bin = atob(text.slice(colon + 1));
    if (bin.length !== length) throw new Error("data block " + name + " is truncated");
    var bytes = new Uint8Array(bin.length);
    for (var i = 0; i < bin.length; i++) bytes[i] = bin.charCodeAt(i);
    return JSON.parse(new TextDecoder("utf-8").decode(bytes));
  }

  function load() {
    var names = ["graph", "layout", "style", "icons"];
    var inline = names.map(decodeBlock);
    if (inline.every(function (x) { return x !== null; })) return Promise.resolve(inline);
    return Promise.all(names.map(function (n) {
      return fetch(n + ".json").then(function (r) { return r.json(); });
    }));
  }

  // ---- model -------------------------------------------------------------

  function parent(t) {
    var i = t.lastIndexOf(".");
    return i < 0 ? null : t.slice(0, i);
  }

  function ancestors(t) {
    var out = [];
    for (var p = parent(t); p !== null; p = parent(p)) out.push(p);
    return out;
  }

  function plainDoc(doc) {
    if (!doc) return "";
    return doc.paragraphs.map(function (p) {
      return p.map(function (s) { return s.text !== undefined ? s.text : s.code; }).join("");
    }).join("\n\n");
  }

  function Model(graph, layout, style, icons) {
    this.graph = graph;
    this.entities = graph.entities;
    this.tokens = Object.keys(graph.entities).sort(compareTokens);
    this.children = {};
    var self = this;
    this.tokens.forEach(function (t) {
      var p = parent(t);
      if (p !== null) (self.children[p] = self.children[p] || []).push(t);
    });
    this.glyphs = style.glyphs;
    this.edgeStyles = {};
    style.edges.forEach(function (e) { self.edgeStyles[e.relationId] = e; });
    this.icons = icons;
    this.positions = {};
    Object.keys(layout.positions).forEach(function (t) {
      var p = layout.positions[t];
      self.positions[t] = { x: p[0], y: p[1] };
    });
    this.pinned = {};
    this.view = {
      expanded: {},
      removed: {},
      highlighted: null,
      kinds: { solution: 1, project: 1, namespace: 1, type: 1, field: 1, method: 1, property: 1, event: 1 },
    };
    this.tokens.forEach(function (t) {
      if (parent(t) === null) self.view.expanded[t] = 1;
    });
    this.selected = null;
    this.refreshVisible();
  }

  function compareTokens(a, b) {
    var x = a.split(".").map(Number), y = b.split(".").map(Number);
    for (var i = 0; i < Math.min(x.length, y.length); i++) if (x[i] !== y[i]) return x[i] - y[i];
    return x.length - y.length;
  }

  Model.prototype.isVisible = function (t) {
    var e = this.entities[t];
    if (!this.view.kinds[e.kind] || this.view.removed[t]) return false;
    var a = ancestors(t);
    for (var i = 0; i < a.length; i++) {
      if (!this.view.expanded[a[i]] || this.view.removed[a[i]]) return false;
    }
    return true;
  };

  Model.prototype.refreshVisible = function () {
    var self = this;
    this.visible = this.tokens.filter(function (t) { return self.isVisible(t); });
    this.visibleSet = {};
    this.visible.forEach(function (t) { self.visibleSet[t] = 1; });
    this.visible.forEach(function (t) {
      if (self.positions[t]) return;
      var anchor = ancestors(t).find(function (a) { return self.positions[a]; });
      var c = anchor ? self.positions[anchor] : { x: 0, y: 0 };
      var k = self.tokens.indexOf(t);
      self.positions[t] = { x: c.x + 20 * Math.cos(k), y: c.y + 20 * Math.sin(k) };
    });
  };

  Model.prototype.toggle = function (t) {
    if (!this.visibleSet[t]) return;
    if (this.view.expanded[t]) {
      var self = this;
      delete this.view.expanded[t];
      this.tokens.forEach(function (d) {
        if (d.indexOf(t + ".") === 0) {
          delete self.view.expanded[d];
          if (self.view.highlighted) delete self.view.highlighted[d];
        }
      });
    } else if (this.children[t]) {
      this.view.expanded[t] = 1;
    }
    this.refreshVisible();
  };

  Model.prototype.remove = function (t) {
    if (!this.visibleSet[t]) return;
    this.view.removed[t] = 1;
    if (this.selected && (this.selected === t || this.selected.indexOf(t + ".") === 0)) this.selected = null;
    this.refreshVisible();
  };

  Model.prototype.edges = function () {
    var out = [];
    var rel = this.graph.relations || {};
    var self = this;
    Object.keys(rel).forEach(function (r) {
      var s = self.edgeStyles[r];
      if (!s || !s.enabled) return;
      rel[r].forEach(function (pair) {
        if (self.visibleSet[pair[0]] && self.visibleSet[pair[1]]) out.push([pair[0], pair[1], s]);
      });
    });
    return out;
  };

  // ---- search ------------------------------------------------------------

  function search(model, mode, text) {
    var test;
    if (mode === "regex") {
      var re = new RegExp(text);
      test = function (e) { return re.test(e.name); };
    } else {
      var needle = text.toLowerCase();
      test = function (e) {
        return e.name.toLowerCase().indexOf(needle) >= 0 || plainDoc(e.docComment).toLowerCase().indexOf(needle) >= 0;
      };
    }
    return model.visible.filter(function (t) { return test(model.entities[t]); });
  }

  // ---- rendering ---------------------------------------------------------

  function Renderer(canvas, model) {
    this.canvas = canvas;
    this.ctx = canvas.getContext("2d");
    this.model = model;
    this.camera = { x: 0, y: 0, zoom: 1 };
    this.paths = {};
    var icons = model.icons.icons;
    var self = this;
    Object.keys(icons).forEach(function (k) { self.paths[k] = new Path2D(icons[k]); });
    this.reducedMotion = window.matchMedia && window.matchMedia("(prefers-reduced-motion: reduce)").matches;
    this.fit();
  }

  Renderer.prototype.fit = function () {
    var m = this.model, xs = [], ys = [];
    m.visible.forEach(function (t) { xs.push(m.positions[t].x); ys.push(m.positions[t].y); });
    if (!xs.length) return;
    var w = Math.max.apply(null, xs) - Math.min.apply(null, xs) + 200;
    var h = Math.max.apply(null, ys) - Math.min.apply(null, ys) + 200;
    this.camera.x = (Math.max.apply(null, xs) + Math.min.apply(null, xs)) / 2;
    this.camera.y = (Math.max.apply(null, ys) + Math.min.apply(null, ys)) / 2;
    this.camera.zoom = Math.min(this.canvas.clientWidth / w, this.canvas.clientHeight / h, 2);
  };

  Renderer.prototype.toWorld = function (sx, sy) {
    var c = this.camera;
    return {
      x: (sx - this.canvas.clientWidth / 2) / c.zoom + c.x,
      y: (sy - this.canvas.clientHeight / 2) / c.zoom + c.y,
    };
  };

  Renderer.prototype.hit = function (sx, sy) {
    var p = this.toWorld(sx, sy), m = this.model, best = null;
    m.visible.forEach(function (t) {
      var q = m.positions[t], r = m.glyphs[t] ? m.glyphs[t].radius : 5;
      if (Math.hypot(q.x - p.x, q.y - p.y) <= r) best = t;
    });
    return best;
  };

  function desaturate(hex, amount) {
    var n = parseInt(hex.slice(1), 16);
    var r = (n >> 16) & 255, g = (n >> 8) & 255, b = n & 255;
    var gray = 0.3 * r + 0.59 * g + 0.11 * b;
    function mix(c) { return Math.round(gray + (c - gray) * amount); }
    return "rgb(" + mix(r) + "," + mix(g) + "," + mix(b) + ")";
  }

  Renderer.prototype.drawGlyph = function (t, time) {
    var ctx = this.ctx, m = this.model, p = m.positions[t];
    var g = m.glyphs[t];
    var grayed = m.view.highlighted && !m.view.highlighted[t];
    var tint = grayed ? desaturate(g.tint, 0) : g.tint;
    var r = g.radius;
    ctx.save();
    ctx.translate(p.x, p.y);
    var ring = r;
    [g.innerOutline, g.middleOutline, g.outerOutline].forEach(function (o) {
      if (o.width <= 0) return;
      ctx.beginPath();
      ctx.setLineDash(o.style === "dashed" ? [3, 2] : []);
      ctx.lineWidth = o.width;
      ctx.strokeStyle = desaturate(g.tint, grayed ? 0 : o.saturation);
      ctx.arc(0, 0, ring + o.width / 2, 0, 2 * Math.PI);
      ctx.stroke();
      ring += o.width;
    });
    ctx.setLineDash([]);
    ctx.beginPath();
    ctx.arc(0, 0, r, 0, 2 * Math.PI);
    ctx.fillStyle = tint;
    ctx.fill();
    var icon = this.paths[g.iconId] || this.paths.placeholder;
    var s = (1.2 * r) / m.icons.viewBox;
    ctx.save();
    ctx.translate(-0.6 * r, -0.6 * r);
    ctx.scale(s, s);
    ctx.lineWidth = 2;
    ctx.strokeStyle = "#fff";
    ctx.stroke(icon);
    ctx.restore();
    if (g.cornerIconId && this.paths[g.cornerIconId]) {
      ctx.save();
      ctx.translate(0.3 * r, 0.3 * r);
      ctx.scale((0.6 * r) / m.icons.viewBox, (0.6 * r) / m.icons.viewBox);
      ctx.lineWidth = 3;
      ctx.strokeStyle = "#333";
      ctx.stroke(this.paths[g.cornerIconId]);
      ctx.restore();
    }
    if (g.effect !== "none") this.drawEffect(g.effect, r, time);
    ctx.restore();
  };

  Renderer.prototype.drawEffect = function (effect, r, time) {
    var ctx = this.ctx;
    if (this.reducedMotion) {
      ctx.beginPath();
      ctx.arc(r, -r, r / 3, 0, 2 * Math.PI);
      ctx.fillStyle = effect === "fire" ? "#e8452c" : "#888";
      ctx.fill();
      return;
    }
    for (var i = 0; i < 8; i++) {
      var phase = ((time / 900 + i / 8) % 1);
      var x = Math.sin(i * 2.4 + time / 300) * r * 0.5;
      var y = -r - phase * r * 1.6;
      ctx.beginPath();
      ctx.arc(x, y, (1 - phase) * r * 0.35, 0, 2 * Math.PI);
      ctx.fillStyle = effect === "fire"
        ? "rgba(255," + Math.round(80 + 150 * phase) + ",40," + (1 - phase) + ")"
        : "rgba(120,120,120," + 0.6 * (1 - phase) + ")";
      ctx.fill();
    }
  };

  Renderer.prototype.draw = function (time) {
    var ctx = this.ctx, c = this.camera, m = this.model;
    var dpr = window.devicePixelRatio || 1;
    var w = this.canvas.clientWidth, h = this.canvas.clientHeight;
    if (this.canvas.width !== w * dpr || this.canvas.height !== h * dpr) {
      this.canvas.width = w * dpr;
      this.canvas.height = h * dpr;
    }
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
    ctx.clearRect(0, 0, w, h);
    ctx.translate(w / 2, h / 2);
    ctx.scale(c.zoom, c.zoom);
    ctx.translate(-c.x, -c.y);
    m.edges().forEach(function (e) {
      var a = m.positions[e[0]], b = m.positions[e[1]];
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.lineWidth = e[2].lineWeight / c.zoom;
      ctx.strokeStyle = e[2].color;
      ctx.stroke();
    });
    var self = this;
    m.visible.forEach(function (t) { self.drawGlyph(t, time); });
    if (m.selected && m.visibleSet[m.selected]) {
      var p = m.positions[m.selected];
      ctx.beginPath();
      ctx.arc(p.x, p.y, m.glyphs[m.selected].radius + 8, 0, 2 * Math.PI);
      ctx.strokeStyle = "#1565c0";
      ctx.lineWidth = 2 / c.zoom;
      ctx.stroke();
    }
  };

  // ---- panels ------------------------------------------------------------

  function el(tag, attrs, text) {
    var e = document.createElement(tag);
    Object.keys(attrs || {}).forEach(function (k) { e.setAttribute(k, attrs[k]); });
    if (text !== undefined) e.textContent = text;
    return e;
  }

  function App(model, renderer) {
    this.model = model;
    this.renderer = renderer;
    this.tool = "select";
    this.panel = "properties";
    this.panelEl = document.getElementById("panel");
  }

  App.prototype.showPanel = function (name) {
    this.panel = name;
    document.querySelectorAll("#dock button").forEach(function (b) {
      b.classList.toggle("active", b.dataset.panel === name);
    });
    this.panelEl.textContent = "";
    this["panel_" + name]();
  };

  App.prototype.panel_properties = function () {
    var p = this.panelEl, t = this.model.selected;
    p.appendChild(el("h2", {}, "Properties"));
    if (!t) { p.appendChild(el("p", {}, "Select a node to see its properties.")); return; }
    var e = this.model.entities[t];
    [["Name", e.name], ["Kind", e.typeKind || e.methodKind || e.kind], ["Accessibility", e.accessibility || ""],
     ["Static", e.isStatic ? "yes" : "no"], ["Token", t],
     ["Members", e.instanceMemberCount + " instance, " + e.staticMemberCount + " static"]].forEach(function (row) {
      p.appendChild(el("div", {}, row[0] + ": " + row[1]));
    });
    if (e.docComment) {
      p.appendChild(el("h2", {}, "Documentation"));
      e.docComment.paragraphs.forEach(function (para) {
        var para_el = el("p");
        para.forEach(function (s) {
          para_el.appendChild(s.code !== undefined ? el("code", {}, s.code) : document.createTextNode(s.text));
        });
        p.appendChild(para_el);
      });
    }
    (e.diagnostics || []).forEach(function (d) {
      p.appendChild(el("div", {}, d.severity + " " + d.code + ": " + d.message));
    });
  };

  App.prototype.panel_search = function () {
    var p = this.panelEl, self = this;
    p.appendChild(el("h2", {}, "Search"));
    var mode = el("select");
    ["fullText", "regex"].forEach(function (m) { mode.appendChild(el("option", { value: m }, m)); });
    var input = el("input", { type: "text", placeholder: "query" });
    var err = el("div", { class: "error" });
    var results = el("div");
    var highlight = el("button", {}, "Highlight");
    var isolate = el("button", {}, "Isolate");
    var clear = el("button", {}, "Clear");
    function run() {
      err.textContent = "";
      results.textContent = "";
      if (!input.value) return [];
      try {
        var found = search(self.model, mode.value, input.value);
      } catch (e) {
        err.textContent = String(e.message);
        return null;
      }
      found.forEach(function (t) {
        var row = el("div", { class: "result" }, self.model.entities[t].name);
        row.onclick = function () { self.select(t); };
        results.appendChild(row);
      });
      return found;
    }
    input.oninput = run;
    highlight.onclick = function () {
      var found = run();
      if (!found) return;
      self.model.view.highlighted = {};
      found.forEach(function (t) { self.model.view.highlighted[t] = 1; });
    };
    isolate.onclick = function () {
      var found = run();
      if (!found) return;
      var keep = {};
      found.forEach(function (t) { keep[t] = 1; ancestors(t).forEach(function (a) { keep[a] = 1; }); });
      self.model.visible.forEach(function (t) { if (!keep[t]) self.model.view.removed[t] = 1; });
      self.model.refreshVisible();
    };
    clear.onclick = function () { self.model.view.highlighted = null; };
    [mode, input, highlight, isolate, clear, err, results].forEach(function (x) { p.appendChild(x); });
  };

  App.prototype.panel_layout = function () {
    var p = this.panelEl, m = this.model, self = this;
    p.appendChild(el("h2", {}, "Entity kinds"));
    ["solution", "project", "package", "namespace", "type", "field", "method", "property", "event"].forEach(function (k) {
      var box = el("input", { type: "checkbox" });
      box.checked = !!m.view.kinds[k];
      box.onchange = function () {
        if (box.checked) m.view.kinds[k] = 1; else delete m.view.kinds[k];
        m.refreshVisible();
      };
      var label = el("label");
      label.appendChild(box);
      label.appendChild(document.createTextNode(" " + k));
      p.appendChild(label);
    });
    p.appendChild(el("h2", {}, "Relations"));
    Object.keys(m.edgeStyles).forEach(function (r) {
      var s = m.edgeStyles[r];
      var box = el("input", { type: "checkbox" });
      box.checked = s.enabled;
      box.disabled = r === "declares";
      box.onchange = function () { s.enabled = box.checked; };
      var color = el("input", { type: "color", value: s.color });
      color.oninput = function () { s.color = color.value; };
      var label = el("label");
      label.appendChild(box);
      label.appendChild(color);
      label.appendChild(document.createTextNode(" " + r));
      p.appendChild(label);
    });
    var refresh = el("button", {}, "Refresh");
    refresh.onclick = function () { self.renderer.fit(); };
    p.appendChild(refresh);
  };

  App.prototype.panel_guide = function () {
    var p = this.panelEl;
    p.appendChild(el("h2", {}, "Guide"));
    ["Each circle is a piece of code. Its icon tells the kind; the corner badge tells who can see it.",
     "Use Toggle and click a node to show what it declares. Click again to fold it.",
     "Rings around a type grow with its member count: solid for instance members, dashed for static ones.",
     "Fire marks errors, smoke marks warnings.",
     "Search highlights or isolates matches. The Layout panel turns kinds and relations on and off."
    ].forEach(function (s) { p.appendChild(el("p", {}, s)); });
  };

  App.prototype.select = function (t) {
    this.model.selected = t;
    if (this.panel === "properties") this.showPanel("properties");
  };

  App.prototype.tour = function () {
    var key = "codecarta.toured";
    try { if (localStorage.getItem(key)) return; localStorage.setItem(key, "1"); } catch (e) { return; }
    var overlay = el("div", { class: "tour" });
    var box = el("div");
    box.appendChild(el("p", {}, "Welcome. The diagram starts with the solution and its projects. Pick the Toggle tool and click a project to open it."));
    var ok = el("button", {}, "Got it");
    ok.onclick = function () { overlay.remove(); };
    box.appendChild(ok);
    overlay.appendChild(box);
    document.getElementById("stage").appendChild(overlay);
  };

  App.prototype.bind = function () {
    var self = this, canvas = this.renderer.canvas, drag = null;
    document.querySelectorAll("#dock button").forEach(function (b) {
      b.onclick = function () { self.showPanel(b.dataset.panel); };
    });
    document.querySelectorAll("#toolbox button").forEach(function (b) {
      b.onclick = function () {
        self.tool = b.dataset.tool;
        document.querySelectorAll("#toolbox button").forEach(function (x) { x.classList.toggle("active", x === b); });
      };
    });
    canvas.onmousedown = function (ev) {
      var t = self.renderer.hit(ev.offsetX, ev.offsetY);
      if (self.tool === "move" && t) { drag = { node: t }; self.model.pinned[t] = 1; return; }
      drag = { pan: true, x: ev.offsetX, y: ev.offsetY, moved: false };
    };
    canvas.onmousemove = function (ev) {
      if (!drag) return;
      if (drag.node) {
        var p = self.renderer.toWorld(ev.offsetX, ev.offsetY);
        self.model.positions[drag.node] = p;
      } else {
        var c = self.renderer.camera;
        c.x -= (ev.offsetX - drag.x) / c.zoom;
        c.y -= (ev.offsetY - drag.y) / c.zoom;
        drag.moved = drag.moved || Math.abs(ev.offsetX - drag.x) + Math.abs(ev.offsetY - drag.y) > 2;
        drag.x = ev.offsetX;
        drag.y = ev.offsetY;
      }
    };
    canvas.onmouseup = function (ev) {
      var wasPan = drag && drag.pan && drag.moved;
      drag = null;
      if (wasPan) return;
      var t = self.renderer.hit(ev.offsetX, ev.offsetY);
      if (!t) { self.model.selected = null; if (self.panel === "properties") self.showPanel("properties"); return; }
      if (self.tool === "select") self.select(t);
      else if (self.tool === "toggle") self.model.toggle(t);
      else if (self.tool === "remove") self.model.remove(t);
    };
    canvas.onwheel = function (ev) {
      ev.preventDefault();
      self.renderer.camera.zoom *= Math.exp(-ev.deltaY / 500);
    };
  };

  function start(data) {
    var model = new Model(data[0], data[1], data[2], data[3]);
    var renderer = new Renderer(document.getElementById("canvas"), model);
    var app = new App(model, renderer);
    app.bind();
    app.showPanel("properties");
    document.querySelector('#toolbox button[data-tool="select"]').classList.add("active");
    app.tour();
    var status = document.getElementById("status");
    (function frame(time) {
      renderer.draw(time);
      status.textContent = model.visible.length + " of " + model.tokens.length + " nodes";
      requestAnimationFrame(frame);
    })(0);
  }

  load().then(start, function (e) {
    document.getElementById("status").textContent = "cannot load diagram data: " + e.message;
  });
})();

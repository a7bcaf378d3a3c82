#!/usr/bin/env python3
"""Fixture corpus generator for chartseam.

Writes SVG fixtures plus ground-truth sidecars under <repo>/fixtures.
d3-, vega- and ggplot-style charts are emitted by templates that follow each
toolchain's DOM conventions; matplotlib charts come from matplotlib itself.
"""
import csv
import io
import json
import math
import os
import random
import sys
import xml.etree.ElementTree as ET
from datetime import date, timedelta

ROOT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

DRAWABLE = {"circle", "ellipse", "line", "polygon", "polyline", "rect", "path", "use", "text"}
SKIP = {"defs", "clipPath", "mask", "pattern", "marker", "symbol", "linearGradient", "radialGradient",
        "style", "title", "desc", "metadata", "filter", "script", "foreignObject"}


def local(tag):
    return tag.split('}')[-1]


def count_marks(svg_text):
    """Independent XML walk counting drawable elements outside non-rendered containers."""
    root = ET.fromstring(svg_text.encode())

    def walk(el):
        name = local(el.tag)
        if name in SKIP:
            return 0
        style = el.get("style", "")
        if el.get("display") == "none" or "display: none" in style or "display:none" in style:
            return 0
        n = 1 if name in DRAWABLE else 0
        if name == "text":
            return n
        return n + sum(walk(c) for c in el)

    return walk(root)


def f(v):
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def nice_ticks(lo, hi, count=6):
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / count))
    err = span / count / step
    if err >= 7.5:
        step *= 10
    elif err >= 3.5:
        step *= 5
    elif err >= 1.5:
        step *= 2
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out, step


def fmt_tick(v):
    if abs(v - round(v)) < 1e-9:
        return str(int(round(v)))
    return f"{v:g}"


def linear(d0, d1, r0, r1):
    return lambda v: r0 + (v - d0) / (d1 - d0) * (r1 - r0)


def iso(d):
    return d.isoformat()


def write_fixture(rel, svg, sidecar):
    path = os.path.join(ROOT, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path + ".svg", "w") as fh:
        fh.write(svg)
    sidecar = dict(sidecar)
    sidecar["markCount"] = count_marks(svg)
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=False)
        fh.write("\n")


# --------------------------------------------------------------------------
# d3-style emission (d3-axis v7 DOM conventions)

class D3:
    def __init__(self, width, height, margin):
        self.w, self.h = width, height
        self.m = margin  # top right bottom left
        self.iw = width - margin[1] - margin[3]
        self.ih = height - margin[0] - margin[2]
        self.parts = []

    def add(self, s):
        self.parts.append(s)

    def x_axis(self, ticks, labels, rotate=False):
        s = [f'<g class="x axis" transform="translate(0,{f(self.ih)})" fill="none" font-size="10" font-family="sans-serif" text-anchor="middle">',
             f'<path class="domain" stroke="currentColor" d="M0.5,6V0.5H{f(self.iw + 0.5)}V6"></path>']
        for px, lab in zip(ticks, labels):
            s.append(f'<g class="tick" opacity="1" transform="translate({f(px + 0.5)},0)"><line stroke="currentColor" y2="6"></line><text fill="currentColor" y="9" dy="0.71em">{lab}</text></g>')
        s.append('</g>')
        self.add("".join(s))

    def y_axis(self, ticks, labels, grid=False):
        s = [f'<g class="y axis" fill="none" font-size="10" font-family="sans-serif" text-anchor="end">',
             f'<path class="domain" stroke="currentColor" d="M-6,{f(self.ih + 0.5)}H0.5V0.5H-6"></path>']
        for py, lab in zip(ticks, labels):
            extra = f'<line stroke="currentColor" stroke-opacity="0.1" x2="{f(self.iw)}"></line>' if grid else ""
            s.append(f'<g class="tick" opacity="1" transform="translate(0,{f(py + 0.5)})"><line stroke="currentColor" x2="-6"></line>{extra}<text fill="currentColor" x="-9" dy="0.32em">{lab}</text></g>')
        s.append('</g>')
        self.add("".join(s))

    def y_axis_left_horizontal(self, ticks, labels):
        # band axis on the left for horizontal bars
        self.y_axis(ticks, labels)

    def titles(self, title=None, xt=None, yt=None):
        if xt:
            self.add(f'<text class="x-title" x="{f(self.iw / 2)}" y="{f(self.ih + 36)}" text-anchor="middle" font-size="12" font-family="sans-serif">{xt}</text>')
        if yt:
            self.add(f'<text class="y-title" transform="rotate(-90)" x="{f(-self.ih / 2)}" y="{f(-(self.m[3] - 14))}" text-anchor="middle" font-size="12" font-family="sans-serif">{yt}</text>')
        if title:
            self.add(f'<text class="title" x="{f(self.iw / 2)}" y="-12" text-anchor="middle" font-size="16" font-weight="bold" font-family="sans-serif">{title}</text>')

    def color_legend(self, x, y, labels, colors, title=None, shape="rect"):
        s = [f'<g class="legend" transform="translate({f(x)},{f(y)})" font-family="sans-serif" font-size="10">']
        if title:
            s.append(f'<text x="0" y="-8" font-weight="bold">{title}</text>')
        for i, (lab, col) in enumerate(zip(labels, colors)):
            if shape == "rect":
                sw = f'<rect width="14" height="14" fill="{col}"></rect>'
            else:
                sw = f'<circle cx="7" cy="7" r="5" fill="{col}"></circle>'
            s.append(f'<g transform="translate(0,{i * 20})">{sw}<text x="20" y="7" dy="0.35em">{lab}</text></g>')
        s.append('</g>')
        self.add("".join(s))

    def svg(self):
        body = "".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" viewBox="0 0 {self.w} {self.h}">'
                f'<g transform="translate({self.m[3]},{self.m[0]})">{body}</g></svg>\n')


PALETTE = ["#4e79a7", "#f28e2c", "#e15759", "#76b7b2", "#59a14f", "#edc949"]


def d3_bar_basic():
    rng = random.Random(11)
    cats = list("ABCDEFGH")
    vals = [round(rng.uniform(8, 95), 1) for _ in cats]
    c = D3(640, 400, (40, 20, 50, 60))
    band = c.iw / len(cats)
    y = linear(0, 100, c.ih, 0)
    yt, _ = nice_ticks(0, 100, 5)
    c.x_axis([band * (i + 0.5) for i in range(len(cats))], cats)
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    for i, v in enumerate(vals):
        x0 = band * i + band * 0.1
        c.add(f'<rect class="bar" x="{f(x0)}" y="{f(y(v))}" width="{f(band * 0.8)}" height="{f(c.ih - y(v))}" fill="steelblue"></rect>')
    c.titles("Frequency by letter", "letter", "frequency")
    rows = [[k, v] for k, v in zip(cats, vals)]
    write_fixture("d3/bar/barchart_basic", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "bar", "seed": 11,
        "title": "Frequency by letter",
        "axes": [{"orientation": "x", "title": "letter", "labels": cats},
                 {"orientation": "y", "title": "frequency", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [], "dataMarks": len(cats), "orientation": "vertical", "stacking": [],
        "fields": [{"name": "letter", "type": "text"}, {"name": "frequency", "type": "number"}],
        "rows": rows})


def d3_scatter():
    rng = random.Random(1)
    pts = [(round(rng.uniform(45, 225), 2), round(rng.uniform(10, 45), 2)) for _ in range(30)]
    c = D3(600, 420, (30, 20, 50, 60))
    xt, _ = nice_ticks(40, 240, 6)
    yt, _ = nice_ticks(5, 50, 5)
    x = linear(xt[0], xt[-1], 0, c.iw)
    y = linear(yt[0], yt[-1], c.ih, 0)
    c.x_axis([x(v) for v in xt], [fmt_tick(v) for v in xt])
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    for px, py in pts:
        c.add(f'<circle cx="{f(x(px))}" cy="{f(y(py))}" r="3.5" fill="#4e79a7" fill-opacity="0.8"></circle>')
    c.titles(None, "horsepower", "mpg")
    write_fixture("d3/scatter/scatter_basic", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "scatter", "seed": 1, "title": None,
        "axes": [{"orientation": "x", "title": "horsepower", "labels": [fmt_tick(v) for v in xt]},
                 {"orientation": "y", "title": "mpg", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [], "dataMarks": 30, "orientation": "none", "stacking": [],
        "fields": [{"name": "horsepower", "type": "number"}, {"name": "mpg", "type": "number"}],
        "rows": [list(p) for p in pts]})


def epoch_days(d):
    return (d - date(1970, 1, 1)).days


MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August", "September",
          "October", "November", "December"]


def d3_multiline():
    rng = random.Random(3)
    months = [date(2020, m, 1) for m in range(1, 13)]
    series = ["north", "south", "west"]
    data = {s: [round(20 + 10 * i + rng.uniform(-8, 8), 1) for _ in months] for i, s in enumerate(series)}
    c = D3(700, 400, (30, 110, 50, 60))
    d0, d1 = epoch_days(months[0]), epoch_days(months[-1])
    x = linear(d0, d1, 0, c.iw)
    yt, _ = nice_ticks(0, 60, 6)
    y = linear(yt[0], yt[-1], c.ih, 0)
    labels = ["2020"] + [MONTHS[d.month - 1][:3] for d in months[1:]]
    c.x_axis([x(epoch_days(d)) for d in months], labels)
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    rows = []
    for s, col in zip(series, PALETTE):
        pts = [(x(epoch_days(d)), y(v)) for d, v in zip(months, data[s])]
        dstr = "M" + "L".join(f"{f(a)},{f(b)}" for a, b in pts)
        c.add(f'<path fill="none" stroke="{col}" stroke-width="1.5" d="{dstr}"></path>')
        rows += [[iso(d), v, s] for d, v in zip(months, data[s])]
    c.color_legend(c.iw + 20, 10, series, PALETTE[:3], "region")
    c.titles("Sales by region", "month", "sales")
    write_fixture("d3/line/multiline", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "multiLine", "seed": 3, "title": "Sales by region",
        "axes": [{"orientation": "x", "title": "month", "labels": labels},
                 {"orientation": "y", "title": "sales", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [{"type": "color", "title": "region", "labels": series}],
        "dataMarks": 3, "orientation": "vertical", "stacking": [],
        "fields": [{"name": "month", "type": "date"}, {"name": "sales", "type": "number"}, {"name": "region", "type": "text"}],
        "rows": rows})


def d3_stacked_bar():
    rng = random.Random(4)
    cats = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat"]
    # weekday names are not dates for the label parser
    cats = ["apples", "pears", "plums", "figs", "kiwis", "limes"]
    series = ["east", "central", "west"]
    vals = {s: [round(rng.uniform(5, 30), 1) for _ in cats] for s in series}
    c = D3(640, 400, (40, 120, 50, 60))
    band = c.iw / len(cats)
    yt, _ = nice_ticks(0, 100, 5)
    y = linear(0, 100, c.ih, 0)
    c.x_axis([band * (i + 0.5) for i in range(len(cats))], cats)
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    rows, stacks = [], []
    for s, col in zip(series, PALETTE):
        c.add(f'<g fill="{col}">')
        for i, k in enumerate(cats):
            below = sum(vals[t][i] for t in series[:series.index(s)])
            top = below + vals[s][i]
            c.add(f'<rect x="{f(band * i + band * 0.1)}" y="{f(y(top))}" height="{f(y(below) - y(top))}" width="{f(band * 0.8)}"></rect>')
        c.add('</g>')
    for i, k in enumerate(cats):
        for s in series:
            rows.append([k, vals[s][i], s])
        stacks.append(series)
    c.color_legend(c.iw + 20, 10, series, PALETTE[:3], "region")
    c.titles("Fruit sales by region", "fruit", "sales")
    write_fixture("d3/stackedBar/stacked_bar", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "stackedBar", "seed": 4, "title": "Fruit sales by region",
        "axes": [{"orientation": "x", "title": "fruit", "labels": cats},
                 {"orientation": "y", "title": "sales", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [{"type": "color", "title": "region", "labels": series}],
        "dataMarks": len(cats) * len(series), "orientation": "vertical",
        "stacking": stacks,
        "fields": [{"name": "fruit", "type": "text"}, {"name": "sales", "type": "number"}, {"name": "region", "type": "text"}],
        "rows": rows})


def d3_histogram():
    rng = random.Random(5)
    values = [min(99.9, max(0.0, rng.gauss(50, 18))) for _ in range(200)]
    edges = list(range(0, 101, 10))
    counts = [sum(1 for v in values if lo <= v < hi) for lo, hi in zip(edges, edges[1:])]
    c = D3(600, 400, (30, 20, 50, 60))
    x = linear(0, 100, 0, c.iw)
    ymax = max(counts)
    yt, ystep = nice_ticks(0, ymax, 5)
    if yt[-1] < ymax:
        yt.append(yt[-1] + ystep)
    y = linear(0, yt[-1], c.ih, 0)
    xt = list(range(0, 101, 20))
    c.x_axis([x(v) for v in xt], [str(v) for v in xt])
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    rows = []
    for (lo, hi), n in zip(zip(edges, edges[1:]), counts):
        if n == 0:
            continue
        c.add(f'<rect x="{f(x(lo) + 1)}" width="{f(x(hi) - x(lo) - 1)}" y="{f(y(n))}" height="{f(c.ih - y(n))}" fill="#69b3a2"></rect>')
        last = hi == edges[-1]
        rows.append([f"[{lo}, {hi}{']' if last else ')'}", n])
    c.titles(None, "score", "count")
    write_fixture("d3/histogram/histogram", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "histogram", "seed": 5, "title": None,
        "axes": [{"orientation": "x", "title": "score", "labels": [str(v) for v in xt]},
                 {"orientation": "y", "title": "count", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [], "dataMarks": len(rows), "orientation": "vertical", "stacking": [],
        "bins": [[lo, hi] for lo, hi in zip(edges, edges[1:])],
        "fields": [{"name": "score", "type": "text"}, {"name": "count", "type": "number"}],
        "rows": rows})


def d3_bubble():
    rng = random.Random(6)
    pts = [(round(rng.uniform(5, 95), 2), round(rng.uniform(5, 95), 2), round(rng.uniform(10, 40), 1)) for _ in range(20)]
    c = D3(640, 420, (30, 120, 50, 60))
    xt, _ = nice_ticks(0, 100, 5)
    yt, _ = nice_ticks(0, 100, 5)
    x = linear(0, 100, 0, c.iw)
    y = linear(0, 100, c.ih, 0)
    k = 6.0  # area px^2 per unit
    r = lambda v: math.sqrt(k * v / math.pi)
    c.x_axis([x(v) for v in xt], [fmt_tick(v) for v in xt])
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    for a, b, s in pts:
        c.add(f'<circle cx="{f(x(a))}" cy="{f(y(b))}" r="{r(s):.4f}" fill="#e15759" fill-opacity="0.6" stroke="#e15759"></circle>')
    leg = [10, 20, 30, 40]
    s = ['<g class="size-legend" font-family="sans-serif" font-size="10" transform="translate(%s,20)">' % f(c.iw + 30)]
    s.append('<text x="-6" y="-10" font-weight="bold">population</text>')
    for i, v in enumerate(leg):
        cy = i * 26
        s.append(f'<circle cx="6" cy="{cy}" r="{r(v):.4f}" fill="none" stroke="#555"></circle>')
        s.append(f'<text x="24" y="{cy}" dy="0.35em">{v}</text>')
    s.append('</g>')
    c.add("".join(s))
    c.titles(None, "alpha", "beta")
    write_fixture("d3/scatter/bubble_size", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "scatter", "seed": 6, "title": None,
        "axes": [{"orientation": "x", "title": "alpha", "labels": [fmt_tick(v) for v in xt]},
                 {"orientation": "y", "title": "beta", "labels": [fmt_tick(v) for v in yt]}],
        "legends": [{"type": "size", "title": "population", "labels": [str(v) for v in leg]}],
        "dataMarks": len(pts), "orientation": "none", "stacking": [],
        "fields": [{"name": "alpha", "type": "number"}, {"name": "beta", "type": "number"}, {"name": "population", "type": "number"}],
        "rows": [list(p) for p in pts]})


def d3_log_scatter():
    rng = random.Random(7)
    pts = [(round(rng.uniform(2, 48), 2), round(10 ** rng.uniform(0.2, 3.8), 2)) for _ in range(25)]
    c = D3(600, 420, (30, 20, 50, 70))
    x = linear(0, 50, 0, c.iw)
    ly = lambda v: c.ih - (math.log10(v) - 0) / 4 * c.ih
    xt = [0, 10, 20, 30, 40, 50]
    yt = [1, 10, 100, 1000, 10000]
    c.x_axis([x(v) for v in xt], [str(v) for v in xt])
    c.y_axis([ly(v) for v in yt], ["1", "10", "100", "1,000", "10,000"])
    for a, b in pts:
        c.add(f'<circle cx="{f(x(a))}" cy="{f(ly(b))}" r="3" fill="#59a14f"></circle>')
    c.titles("Growth", "week", "cells")
    write_fixture("d3/scatter/log_scatter", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "scatter", "seed": 7, "title": "Growth",
        "axes": [{"orientation": "x", "title": "week", "labels": [str(v) for v in xt]},
                 {"orientation": "y", "title": "cells", "labels": ["1", "10", "100", "1,000", "10,000"], "scale": "log"}],
        "legends": [], "dataMarks": len(pts), "orientation": "none", "stacking": [],
        "fields": [{"name": "week", "type": "number"}, {"name": "cells", "type": "number"}],
        "rows": [list(p) for p in pts]})


def d3_diverging():
    rng = random.Random(8)
    cats = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf"]
    vals = [round(rng.uniform(-45, 45), 1) for _ in cats]
    c = D3(640, 400, (30, 20, 50, 60))
    band = c.iw / len(cats)
    yt = [-50, -25, 0, 25, 50]
    y = linear(-50, 50, c.ih, 0)
    c.x_axis([band * (i + 0.5) for i in range(len(cats))], cats)
    c.y_axis([y(v) for v in yt], ["−50", "−25", "0", "25", "50"])
    for i, v in enumerate(vals):
        top, bot = (y(v), y(0)) if v >= 0 else (y(0), y(v))
        col = "#4e79a7" if v >= 0 else "#e15759"
        c.add(f'<rect x="{f(band * i + band * 0.15)}" y="{f(top)}" width="{f(band * 0.7)}" height="{f(bot - top)}" fill="{col}"></rect>')
    c.titles(None, "team", "change")
    write_fixture("d3/bar/diverging_bar", c.svg(), {
        "toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "bar", "seed": 8, "title": None,
        "axes": [{"orientation": "x", "title": "team", "labels": cats},
                 {"orientation": "y", "title": "change", "labels": ["−50", "−25", "0", "25", "50"]}],
        "legends": [], "dataMarks": len(cats), "orientation": "vertical", "stacking": [],
        "fields": [{"name": "team", "type": "text"}, {"name": "change", "type": "number"}],
        "rows": [[k, v] for k, v in zip(cats, vals)]})


# --------------------------------------------------------------------------
# vega-style emission (vega 5 svg renderer conventions)

class Vega:
    def __init__(self, width, height, pad):
        self.w, self.h = width, height
        self.pad = pad  # left, top
        self.parts = []

    def add(self, s):
        self.parts.append(s)

    def frame(self, iw, ih):
        self.iw, self.ih = iw, ih
        self.add(f'<path class="background" aria-hidden="true" d="M0.5,0.5h{f(iw)}v{f(ih)}h-{f(iw)}Z" fill="none" stroke="#ddd"></path>')

    def x_axis(self, ticks, labels, title, grid=True):
        s = ['<g class="mark-group role-axis" aria-label="X-axis"><g transform="translate(0.5,%s)">' % f(self.ih + 0.5)]
        if grid:
            s.append('<g class="mark-rule role-axis-grid" pointer-events="none">')
            for px in ticks:
                s.append(f'<line transform="translate({f(px)},-{f(self.ih)})" x2="0" y2="{f(self.ih)}" stroke="#ddd" stroke-width="1" opacity="1"></line>')
            s.append('</g>')
        s.append('<g class="mark-rule role-axis-tick" pointer-events="none">')
        for px in ticks:
            s.append(f'<line transform="translate({f(px)},0)" x2="0" y2="5" stroke="#888" stroke-width="1" opacity="1"></line>')
        s.append('</g><g class="mark-text role-axis-label" pointer-events="none">')
        for px, lab in zip(ticks, labels):
            s.append(f'<text text-anchor="middle" transform="translate({f(px)},15)" font-family="sans-serif" font-size="10px" fill="#000" opacity="1">{lab}</text>')
        s.append(f'</g><g class="mark-rule role-axis-domain" pointer-events="none"><line transform="translate(0,0)" x2="{f(self.iw)}" y2="0" stroke="#888" stroke-width="1" opacity="1"></line></g>')
        s.append(f'<g class="mark-text role-axis-title" pointer-events="none"><text text-anchor="middle" transform="translate({f(self.iw / 2)},30)" font-family="sans-serif" font-size="11px" font-weight="bold" fill="#000" opacity="1">{title}</text></g>')
        s.append('</g></g>')
        self.add("".join(s))

    def y_axis(self, ticks, labels, title, grid=True):
        s = ['<g class="mark-group role-axis" aria-label="Y-axis"><g transform="translate(0.5,0.5)">']
        if grid:
            s.append('<g class="mark-rule role-axis-grid" pointer-events="none">')
            for py in ticks:
                s.append(f'<line transform="translate(0,{f(py)})" x2="{f(self.iw)}" y2="0" stroke="#ddd" stroke-width="1" opacity="1"></line>')
            s.append('</g>')
        s.append('<g class="mark-rule role-axis-tick" pointer-events="none">')
        for py in ticks:
            s.append(f'<line transform="translate(0,{f(py)})" x2="-5" y2="0" stroke="#888" stroke-width="1" opacity="1"></line>')
        s.append('</g><g class="mark-text role-axis-label" pointer-events="none">')
        for py, lab in zip(ticks, labels):
            s.append(f'<text text-anchor="end" transform="translate(-7,{f(py + 3)})" font-family="sans-serif" font-size="10px" fill="#000" opacity="1">{lab}</text>')
        s.append(f'</g><g class="mark-rule role-axis-domain" pointer-events="none"><line transform="translate(0,{f(self.ih)})" x2="0" y2="-{f(self.ih)}" stroke="#888" stroke-width="1" opacity="1"></line></g>')
        s.append(f'<g class="mark-text role-axis-title" pointer-events="none"><text text-anchor="middle" transform="translate(-40,{f(self.ih / 2)}) rotate(-90) translate(0,-2)" font-family="sans-serif" font-size="11px" font-weight="bold" fill="#000" opacity="1">{title}</text></g>')
        s.append('</g></g>')
        self.add("".join(s))

    def legend(self, x, labels, colors, title, symbol="circle"):
        s = [f'<g class="mark-group role-legend" aria-label="legend"><g transform="translate({f(x)},0)">']
        s.append(f'<g class="mark-text role-legend-title"><text text-anchor="start" transform="translate(0,9)" font-family="sans-serif" font-size="11px" font-weight="bold" fill="#000">{title}</text></g>')
        s.append('<g class="mark-group role-legend-entry"><g transform="translate(0,16)">')
        for i, (lab, col) in enumerate(zip(labels, colors)):
            cy = i * 16 + 6.5
            if symbol == "circle":
                sym = f'<path transform="translate(6,{f(cy)})" d="M5,0A5,5,0,1,1,-5,0A5,5,0,1,1,5,0" fill="{col}" stroke-width="1.5" opacity="1"></path>'
            else:
                sym = f'<path transform="translate(6,{f(cy)})" d="M-5,-5h10v10h-10Z" fill="{col}" opacity="1"></path>'
            s.append(f'<g class="mark-group role-scope">{sym}<text text-anchor="start" transform="translate(16,{f(cy + 3)})" font-family="sans-serif" font-size="10px" fill="#000" opacity="1">{lab}</text></g>')
        s.append('</g></g></g></g>')
        self.add("".join(s))

    def svg(self):
        body = "".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" class="marks" width="{self.w}" height="{self.h}" viewBox="0 0 {self.w} {self.h}">'
                f'<rect width="{self.w}" height="{self.h}" fill="white"></rect>'
                f'<g fill="none" stroke-miterlimit="10" transform="translate({self.pad[0]},{self.pad[1]})"><g class="mark-group role-frame root" role="graphics-object"><g transform="translate(0,0)">{body}</g></g></g></svg>\n')


def vega_grouped_bar():
    rng = random.Random(9)
    cats = ["Q1", "Q2", "Q3", "Q4"]
    cats = ["north", "south", "east", "west"]
    groups = ["2019", "2020", "2021"]
    groups = ["radio", "print", "online"]
    vals = {(c, g): round(rng.uniform(10, 90), 1) for c in cats for g in groups}
    v = Vega(560, 360, (50, 10))
    v.frame(400, 300)
    band = 400 / len(cats)
    yt = [0, 20, 40, 60, 80, 100]
    y = linear(0, 100, 300, 0)
    v.y_axis([y(t) for t in yt], [str(t) for t in yt], "spend")
    v.x_axis([band * (i + 0.5) for i in range(len(cats))], cats, "market", grid=False)
    s = ['<g class="mark-rect role-mark marks" role="graphics-object">']
    rows = []
    sub = band * 0.8 / len(groups)
    for i, cname in enumerate(cats):
        for j, g in enumerate(groups):
            val = vals[(cname, g)]
            x0 = band * i + band * 0.1 + j * sub
            s.append(f'<path d="M{f(x0)},{f(y(val))}h{f(sub)}v{f(300 - y(val))}h-{f(sub)}Z" fill="{PALETTE[j]}"></path>')
            rows.append([cname, val, g])
    s.append('</g>')
    v.add("".join(s))
    v.legend(420, groups, PALETTE[:3], "channel", symbol="square")
    write_fixture("vega/groupedBar/grouped_bar", v.svg(), {
        "toolchain": "vega-style (vega 5 svg renderer conventions)", "chartType": "groupedBar", "seed": 9, "title": None,
        "axes": [{"orientation": "x", "title": "market", "labels": cats},
                 {"orientation": "y", "title": "spend", "labels": [str(t) for t in yt]}],
        "legends": [{"type": "color", "title": "channel", "labels": groups}],
        "dataMarks": len(rows), "orientation": "vertical", "stacking": [],
        "fields": [{"name": "market", "type": "text"}, {"name": "spend", "type": "number"}, {"name": "channel", "type": "text"}],
        "rows": rows})


def vega_scatter_color():
    rng = random.Random(10)
    classes = ["setosa", "versicolor", "virginica"]
    pts = []
    for i, cl in enumerate(classes):
        for _ in range(13):
            pts.append((round(rng.uniform(4.3 + i, 5.5 + i), 2), round(rng.uniform(2.0, 4.4), 2), cl))
    v = Vega(560, 360, (50, 10))
    v.frame(400, 300)
    xt = [4, 5, 6, 7, 8]
    yt = [2.0, 2.5, 3.0, 3.5, 4.0, 4.5]
    x = linear(4, 8, 0, 400)
    y = linear(2, 4.5, 300, 0)
    v.x_axis([x(t) for t in xt], [str(t) for t in xt], "sepal length")
    v.y_axis([y(t) for t in yt], [f"{t:.1f}" for t in yt], "sepal width")
    s = ['<g class="mark-symbol role-mark marks" role="graphics-object">']
    for a, b, cl in pts:
        s.append(f'<path transform="translate({f(x(a))},{f(y(b))})" d="M2.739,0A2.739,2.739,0,1,1,-2.739,0A2.739,2.739,0,1,1,2.739,0" fill="{PALETTE[classes.index(cl)]}" stroke-width="2" opacity="0.7"></path>')
    s.append('</g>')
    v.add("".join(s))
    v.legend(420, classes, PALETTE[:3], "species")
    write_fixture("vega/scatter/scatter_color", v.svg(), {
        "toolchain": "vega-style (vega 5 svg renderer conventions)", "chartType": "scatter", "seed": 10, "title": None,
        "axes": [{"orientation": "x", "title": "sepal length", "labels": [str(t) for t in xt]},
                 {"orientation": "y", "title": "sepal width", "labels": [f"{t:.1f}" for t in yt]}],
        "legends": [{"type": "color", "title": "species", "labels": classes}],
        "dataMarks": len(pts), "orientation": "none", "stacking": [],
        "fields": [{"name": "sepal length", "type": "number"}, {"name": "sepal width", "type": "number"}, {"name": "species", "type": "text"}],
        "rows": [list(p) for p in pts]})


def vega_stacked_area():
    rng = random.Random(12)
    years = list(range(2000, 2011))
    series = ["coal", "gas", "solar"]
    vals = {s: [round(rng.uniform(5, 30), 1) for _ in years] for s in series}
    v = Vega(560, 360, (50, 10))
    v.frame(400, 300)
    x = linear(2000, 2010, 0, 400)
    yt = [0, 20, 40, 60, 80, 100]
    y = linear(0, 100, 300, 0)
    xt = [2000, 2002, 2004, 2006, 2008, 2010]
    v.x_axis([x(t) for t in xt], [str(t) for t in xt], "year", grid=False)
    v.y_axis([y(t) for t in yt], [str(t) for t in yt], "output")
    s = ['<g class="mark-area role-mark marks" role="graphics-object">']
    rows = []
    base = [0.0] * len(years)
    for k, name in enumerate(series):
        top = [b + vv for b, vv in zip(base, vals[name])]
        upper = [(x(yr), y(t)) for yr, t in zip(years, top)]
        lower = [(x(yr), y(b)) for yr, b in reversed(list(zip(years, base)))]
        d = "M" + "L".join(f"{f(a)},{f(b)}" for a, b in upper + lower) + "Z"
        s.append(f'<g class="mark-group"><path d="{d}" fill="{PALETTE[k]}" opacity="1"></path></g>')
        rows += [[yr, vv, name] for yr, vv in zip(years, vals[name])]
        base = top
    s.append('</g>')
    v.add("".join(s))
    v.legend(420, series, PALETTE[:3], "source", symbol="square")
    write_fixture("vega/stackedArea/stacked_area", v.svg(), {
        "toolchain": "vega-style (vega 5 svg renderer conventions)", "chartType": "stackedArea", "seed": 12, "title": None,
        "axes": [{"orientation": "x", "title": "year", "labels": [str(t) for t in xt]},
                 {"orientation": "y", "title": "output", "labels": [str(t) for t in yt]}],
        "legends": [{"type": "color", "title": "source", "labels": series}],
        "dataMarks": 3, "orientation": "vertical", "stacking": [series],
        "fields": [{"name": "year", "type": "number"}, {"name": "output", "type": "number"}, {"name": "source", "type": "text"}],
        "rows": rows})


def vega_hbar():
    rng = random.Random(13)
    cats = ["lisbon", "madrid", "paris", "rome", "vienna"]
    vals = [round(rng.uniform(10, 95), 1) for _ in cats]
    v = Vega(520, 300, (70, 10))
    v.frame(400, 240)
    band = 240 / len(cats)
    xt = [0, 20, 40, 60, 80, 100]
    x = linear(0, 100, 0, 400)
    v.x_axis([x(t) for t in xt], [str(t) for t in xt], "visitors")
    v.y_axis([band * (i + 0.5) for i in range(len(cats))], cats, "city", grid=False)
    s = ['<g class="mark-rect role-mark marks" role="graphics-object">']
    for i, val in enumerate(vals):
        y0 = band * i + band * 0.1
        s.append(f'<path d="M0,{f(y0)}h{f(x(val))}v{f(band * 0.8)}h-{f(x(val))}Z" fill="#4c78a8"></path>')
    s.append('</g>')
    v.add("".join(s))
    write_fixture("vega/bar/horizontal_bar", v.svg(), {
        "toolchain": "vega-style (vega 5 svg renderer conventions)", "chartType": "bar", "seed": 13, "title": None,
        "axes": [{"orientation": "x", "title": "visitors", "labels": [str(t) for t in xt]},
                 {"orientation": "y", "title": "city", "labels": cats}],
        "legends": [], "dataMarks": len(cats), "orientation": "horizontal", "stacking": [],
        "fields": [{"name": "visitors", "type": "number"}, {"name": "city", "type": "text"}],
        "rows": [[val, k] for k, val in zip(cats, vals)]})


# --------------------------------------------------------------------------
# ggplot2 via svglite conventions

class GG:
    def __init__(self, width, height, panel):
        self.w, self.h = width, height
        self.px0, self.py0, self.pw, self.ph = panel
        self.parts = []

    def add(self, s):
        self.parts.append(s)

    def panel(self, xs, ys, minor_x=(), minor_y=()):
        x0, y0, w, h = self.px0, self.py0, self.pw, self.ph
        self.add(f"<rect x='{f(x0)}' y='{f(y0)}' width='{f(w)}' height='{f(h)}' style='stroke-width: 1.07; stroke: none; fill: #EBEBEB;' />")
        for py in minor_y:
            self.add(f"<polyline points='{f(x0)},{f(py)} {f(x0 + w)},{f(py)} ' style='stroke-width: 0.53; stroke: #FFFFFF; stroke-linecap: butt;' />")
        for px in minor_x:
            self.add(f"<polyline points='{f(px)},{f(y0 + h)} {f(px)},{f(y0)} ' style='stroke-width: 0.53; stroke: #FFFFFF; stroke-linecap: butt;' />")
        for py in ys:
            self.add(f"<polyline points='{f(x0)},{f(py)} {f(x0 + w)},{f(py)} ' style='stroke-width: 1.07; stroke: #FFFFFF; stroke-linecap: butt;' />")
        for px in xs:
            self.add(f"<polyline points='{f(px)},{f(y0 + h)} {f(px)},{f(y0)} ' style='stroke-width: 1.07; stroke: #FFFFFF; stroke-linecap: butt;' />")

    def axes(self, xs, xl, ys, yl):
        x0, y0, w, h = self.px0, self.py0, self.pw, self.ph
        for py, lab in zip(ys, yl):
            self.add(f"<text x='{f(x0 - 4.4)}' y='{f(py + 3.15)}' text-anchor='end' style='font-size: 8.80px; fill: #4D4D4D; font-family: \"Liberation Sans\";' textLength='{f(4.9 * len(lab))}px' lengthAdjust='spacingAndGlyphs'>{lab}</text>")
        for py in ys:
            self.add(f"<polyline points='{f(x0 - 2.74)},{f(py)} {f(x0)},{f(py)} ' style='stroke-width: 1.07; stroke: #333333; stroke-linecap: butt;' />")
        for px in xs:
            self.add(f"<polyline points='{f(px)},{f(y0 + h + 2.74)} {f(px)},{f(y0 + h)} ' style='stroke-width: 1.07; stroke: #333333; stroke-linecap: butt;' />")
        for px, lab in zip(xs, xl):
            self.add(f"<text x='{f(px)}' y='{f(y0 + h + 12.5)}' text-anchor='middle' style='font-size: 8.80px; fill: #4D4D4D; font-family: \"Liberation Sans\";' textLength='{f(4.9 * len(lab))}px' lengthAdjust='spacingAndGlyphs'>{lab}</text>")

    def titles(self, xt, yt, title=None):
        x0, y0, w, h = self.px0, self.py0, self.pw, self.ph
        self.add(f"<text x='{f(x0 + w / 2)}' y='{f(y0 + h + 28)}' text-anchor='middle' style='font-size: 11.00px; font-family: \"Liberation Sans\";'>{xt}</text>")
        self.add(f"<text transform='translate({f(x0 - 30)},{f(y0 + h / 2)}) rotate(-90)' text-anchor='middle' style='font-size: 11.00px; font-family: \"Liberation Sans\";'>{yt}</text>")
        if title:
            self.add(f"<text x='{f(x0)}' y='{f(y0 - 9)}' style='font-size: 13.20px; font-family: \"Liberation Sans\";'>{title}</text>")

    def legend(self, x, y, title, labels, colors, key="line"):
        self.add(f"<text x='{f(x)}' y='{f(y)}' style='font-size: 11.00px; font-family: \"Liberation Sans\";'>{title}</text>")
        for i, (lab, col) in enumerate(zip(labels, colors)):
            ky = y + 8 + i * 17.28
            self.add(f"<rect x='{f(x)}' y='{f(ky)}' width='17.28' height='17.28' style='stroke-width: 1.07; stroke: none; fill: #F2F2F2;' />")
            if key == "line":
                self.add(f"<line x1='{f(x + 1.73)}' y1='{f(ky + 8.64)}' x2='{f(x + 15.55)}' y2='{f(ky + 8.64)}' style='stroke-width: 1.07; stroke: {col}; stroke-linecap: butt;' />")
            else:
                self.add(f"<rect x='{f(x + 0.71)}' y='{f(ky + 0.71)}' width='15.86' height='15.86' style='stroke-width: 1.07; stroke: none; fill: {col};' />")
            self.add(f"<text x='{f(x + 22.78)}' y='{f(ky + 11.79)}' style='font-size: 8.80px; font-family: \"Liberation Sans\";' textLength='{f(4.9 * len(lab))}px' lengthAdjust='spacingAndGlyphs'>{lab}</text>")

    def svg(self):
        x0, y0, w, h = self.px0, self.py0, self.pw, self.ph
        head = ("<?xml version='1.0' encoding='UTF-8' ?>\n"
                f"<svg xmlns='http://www.w3.org/2000/svg' xmlns:xlink='http://www.w3.org/1999/xlink' class='svglite' width='{self.w}.00pt' height='{self.h}.00pt' viewBox='0 0 {self.w} {self.h}'>\n"
                "<defs>\n  <style type='text/css'><![CDATA[\n    .svglite line, .svglite polyline, .svglite polygon, .svglite path, .svglite rect, .svglite circle {\n      fill: none;\n      stroke: #000000;\n      stroke-linecap: round;\n      stroke-linejoin: round;\n      stroke-miterlimit: 10.00;\n    }\n  ]]></style>\n</defs>\n"
                f"<rect width='{self.w}' height='{self.h}' style='stroke: none; fill: #FFFFFF;'/>\n"
                f"<defs>\n  <clipPath id='cpMC4wMHw3MjAuMDB8MC4wMHw1NzYuMDA='>\n    <rect x='0.00' y='0.00' width='{self.w}' height='{self.h}' />\n  </clipPath>\n</defs>\n"
                f"<g clip-path='url(#cpMC4wMHw3MjAuMDB8MC4wMHw1NzYuMDA=)'>\n"
                f"<rect x='0.00' y='0.00' width='{self.w}' height='{self.h}' style='stroke-width: 1.07; stroke: #FFFFFF; fill: #FFFFFF;' />\n"
                "</g>\n"
                f"<defs>\n  <clipPath id='cpPANEL'>\n    <rect x='{f(x0)}' y='{f(y0)}' width='{f(w)}' height='{f(h)}' />\n  </clipPath>\n</defs>\n")
        return head + "<g clip-path='url(#cpPANEL)'>\n" + "\n".join(self.parts) + "\n</g>\n</svg>\n"


def gg_lines():
    rng = random.Random(14)
    xs_data = list(range(1, 11))
    series = ["control", "dose-a", "dose-b"]
    cols = ["#F8766D", "#00BA38", "#619CFF"]
    vals = {s: [round(10 + 5 * k + 2 * i + rng.uniform(-3, 3), 2) for i in xs_data] for k, s in enumerate(series)}
    g = GG(640, 400, (40.0, 20.0, 480.0, 320.0))
    x = linear(0.55, 10.45, g.px0, g.px0 + g.pw)
    y = linear(0, 50, g.py0 + g.ph, g.py0)
    xt = [2.5, 5.0, 7.5, 10.0]
    yt = [0, 10, 20, 30, 40, 50]
    g.panel([x(t) for t in xt], [y(t) for t in yt], minor_x=[x(t) for t in (1.25, 3.75, 6.25, 8.75)], minor_y=[y(t) for t in (5, 15, 25, 35, 45)])
    rows = []
    for s, col in zip(series, cols):
        pts = " ".join(f"{f(x(a))},{f(y(b))}" for a, b in zip(xs_data, vals[s]))
        g.add(f"<polyline points='{pts} ' style='stroke-width: 1.07; stroke: {col}; stroke-linecap: butt;' />")
        rows += [[a, b, s] for a, b in zip(xs_data, vals[s])]
    g.axes([x(t) for t in xt], ["2.5", "5.0", "7.5", "10.0"], [y(t) for t in yt], [str(t) for t in yt])
    g.titles("day", "response", "Response over time")
    g.legend(g.px0 + g.pw + 12, 150, "group", series, cols, key="line")
    write_fixture("ggplot/line/multiline_legend", g.svg(), {
        "toolchain": "ggplot-style (ggplot2 3.5 via svglite conventions)", "chartType": "multiLine", "seed": 14,
        "title": "Response over time",
        "axes": [{"orientation": "x", "title": "day", "labels": ["2.5", "5.0", "7.5", "10.0"]},
                 {"orientation": "y", "title": "response", "labels": [str(t) for t in yt]}],
        "legends": [{"type": "color", "title": "group", "labels": series}],
        "dataMarks": 3, "orientation": "vertical", "stacking": [],
        "fields": [{"name": "day", "type": "number"}, {"name": "response", "type": "number"}, {"name": "group", "type": "text"}],
        "rows": rows})


def gg_col():
    rng = random.Random(15)
    cats = ["cut", "fair", "good", "ideal", "premium"]
    vals = [round(rng.uniform(100, 900), 0) for _ in cats]
    g = GG(560, 400, (45.0, 20.0, 480.0, 330.0))
    band = g.pw / (len(cats) + 0.2)
    cx = [g.px0 + band * (i + 0.6) for i in range(len(cats))]
    y = linear(0, 1000, g.py0 + g.ph, g.py0)
    yt = [0, 250, 500, 750, 1000]
    g.panel(cx, [y(t) for t in yt], minor_y=[y(t) for t in (125, 375, 625, 875)])
    for c0, val in zip(cx, vals):
        g.add(f"<rect x='{f(c0 - band * 0.45)}' y='{f(y(val))}' width='{f(band * 0.9)}' height='{f(y(0) - y(val))}' style='stroke-width: 1.07; stroke: none; stroke-linecap: butt; stroke-linejoin: miter; fill: #595959;' />")
    g.axes(cx, cats, [y(t) for t in yt], [str(t) for t in yt])
    g.titles("quality", "count")
    write_fixture("ggplot/bar/column_chart", g.svg(), {
        "toolchain": "ggplot-style (ggplot2 3.5 via svglite conventions)", "chartType": "bar", "seed": 15, "title": None,
        "axes": [{"orientation": "x", "title": "quality", "labels": cats},
                 {"orientation": "y", "title": "count", "labels": [str(t) for t in yt]}],
        "legends": [], "dataMarks": len(cats), "orientation": "vertical", "stacking": [],
        "fields": [{"name": "quality", "type": "text"}, {"name": "count", "type": "number"}],
        "rows": [[k, v] for k, v in zip(cats, vals)]})


# --------------------------------------------------------------------------
# matplotlib (real toolchain)

def mpl_setup():
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.fonttype"] = "none"
    plt.rcParams["svg.hashsalt"] = "chartseam-fixtures"
    return matplotlib, plt


def visible_labels(ax, which):
    lo, hi = sorted(ax.get_xlim() if which == "x" else ax.get_ylim())
    ticks = ax.get_xticklabels() if which == "x" else ax.get_yticklabels()
    locs = ax.get_xticks() if which == "x" else ax.get_yticks()
    span = hi - lo
    return [t.get_text() for t, v in zip(ticks, locs) if lo - 1e-9 * span <= v <= hi + 1e-9 * span]


def mpl_save(fig):
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def mpl_line():
    matplotlib, plt = mpl_setup()
    rng = random.Random(16)
    xs = [0, 1, 2, 3, 4, 5, 6, 7, 8]
    a = [round(rng.uniform(1, 9), 2) for _ in xs]
    b = [round(rng.uniform(1, 9), 2) for _ in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, a, label="sensor-1")
    ax.plot(xs, b, label="sensor-2")
    ax.set_xlim(0, 8)
    ax.set_ylim(0, 10)
    ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0))
    ax.set_xlabel("hour")
    ax.set_ylabel("reading")
    ax.set_title("Sensor readings")
    fig.tight_layout()
    svg = mpl_save(fig)
    plt.close(fig)
    xl = visible_labels(ax, "x")
    yl = visible_labels(ax, "y")
    rows = [[x, v, "sensor-1"] for x, v in zip(xs, a)] + [[x, v, "sensor-2"] for x, v in zip(xs, b)]
    write_fixture("matplotlib/line/line_legend", svg, {
        "toolchain": f"matplotlib {matplotlib.__version__}", "chartType": "multiLine", "seed": 16, "title": "Sensor readings",
        "axes": [{"orientation": "x", "title": "hour", "labels": xl}, {"orientation": "y", "title": "reading", "labels": yl}],
        "legends": [{"type": "color", "title": None, "labels": ["sensor-1", "sensor-2"]}],
        "dataMarks": 2, "orientation": "vertical", "stacking": [],
        "fields": [{"name": "hour", "type": "number"}, {"name": "reading", "type": "number"}, {"name": "color", "type": "text"}],
        "rows": rows})


def mpl_bar():
    matplotlib, plt = mpl_setup()
    rng = random.Random(17)
    cats = ["oak", "pine", "birch", "maple", "cedar", "elm"]
    vals = [round(rng.uniform(2, 28), 1) for _ in cats]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(cats, vals, color="#8c564b")
    ax.set_ylim(0, 30)
    ax.set_xlabel("species")
    ax.set_ylabel("height")
    fig.tight_layout()
    svg = mpl_save(fig)
    plt.close(fig)
    yl = visible_labels(ax, "y")
    write_fixture("matplotlib/bar/bar_basic", svg, {
        "toolchain": f"matplotlib {matplotlib.__version__}", "chartType": "bar", "seed": 17, "title": None,
        "axes": [{"orientation": "x", "title": "species", "labels": cats}, {"orientation": "y", "title": "height", "labels": yl}],
        "legends": [], "dataMarks": len(cats), "orientation": "vertical", "stacking": [],
        "fields": [{"name": "species", "type": "text"}, {"name": "height", "type": "number"}],
        "rows": [[k, v] for k, v in zip(cats, vals)]})


def mpl_scatter():
    matplotlib, plt = mpl_setup()
    rng = random.Random(18)
    groups = ["alpha", "beta", "gamma"]
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = []
    for i, gname in enumerate(groups):
        xs = [round(rng.uniform(0, 10), 2) for _ in range(10)]
        ys = [round(rng.uniform(0, 100), 1) for _ in range(10)]
        ax.scatter(xs, ys, label=gname, s=20)
        rows += [[a, b, gname] for a, b in zip(xs, ys)]
    ax.set_xlim(-0.5, 10.5)
    ax.set_ylim(-5, 105)
    ax.set_xlabel("dose")
    ax.set_ylabel("effect")
    ax.legend(title="cohort", loc="upper left", bbox_to_anchor=(1.01, 1.0))
    fig.tight_layout()
    svg = mpl_save(fig)
    plt.close(fig)
    xl = visible_labels(ax, "x")
    yl = visible_labels(ax, "y")
    write_fixture("matplotlib/scatter/scatter_groups", svg, {
        "toolchain": f"matplotlib {matplotlib.__version__}", "chartType": "scatter", "seed": 18, "title": None,
        "axes": [{"orientation": "x", "title": "dose", "labels": xl}, {"orientation": "y", "title": "effect", "labels": yl}],
        "legends": [{"type": "color", "title": "cohort", "labels": groups}],
        "dataMarks": len(rows), "orientation": "none", "stacking": [],
        "fields": [{"name": "dose", "type": "number"}, {"name": "effect", "type": "number"}, {"name": "cohort", "type": "text"}],
        "rows": rows})


def mpl_area():
    matplotlib, plt = mpl_setup()
    rng = random.Random(19)
    xs = list(range(0, 13))
    a = [round(rng.uniform(2, 6), 2) for _ in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.fill_between(xs, [0] * len(xs), a, color="#17becf")
    ax.set_xlim(0, 12)
    ax.set_ylim(0, 8)
    ax.set_xlabel("month")
    ax.set_ylabel("rainfall")
    fig.tight_layout()
    svg = mpl_save(fig)
    plt.close(fig)
    xl = visible_labels(ax, "x")
    yl = visible_labels(ax, "y")
    write_fixture("matplotlib/area/area_fill", svg, {
        "toolchain": f"matplotlib {matplotlib.__version__}", "chartType": "area", "seed": 19, "title": None,
        "axes": [{"orientation": "x", "title": "month", "labels": xl}, {"orientation": "y", "title": "rainfall", "labels": yl}],
        "legends": [], "dataMarks": 1, "orientation": "vertical", "stacking": [],
        "fields": [{"name": "month", "type": "number"}, {"name": "rainfall", "type": "number"}],
        "rows": [[x, v] for x, v in zip(xs, a)]})


# --------------------------------------------------------------------------
# linked suites

def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)


def d3_time_scatter(width, days, values, colors, color_of, ytitle, ymax, legend_title, legend_labels):
    c = D3(width, 400, (30, 110, 50, 60))
    d0 = epoch_days(days[0])
    d1 = epoch_days(days[-1])
    x = linear(d0, d1, 0, c.iw)
    yt, ystep = nice_ticks(0, ymax, 5)
    if yt[-1] < ymax:
        yt.append(yt[-1] + ystep)
    y = linear(0, yt[-1], c.ih, 0)
    month_starts = [d for d in days if d.day == 1]
    labels = [str(d.year) if d.month == 1 else MONTHS[d.month - 1] for d in month_starts]
    c.x_axis([x(epoch_days(d)) for d in month_starts], labels)
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    for d, v, col in zip(days, values, colors):
        c.add(f'<circle cx="{f(x(epoch_days(d)))}" cy="{f(y(v))}" r="3" fill="none" stroke="{col}" stroke-width="1.5"></circle>')
    c.color_legend(c.iw + 20, 16, legend_labels, [color_of[l] for l in legend_labels], legend_title, shape="circle")
    c.titles(None, "date", ytitle)
    return c.svg(), labels, [fmt_tick(v) for v in yt]


def weather_trio():
    rng = random.Random(20)
    out = os.path.join(ROOT, "suites", "weather-trio")
    os.makedirs(out, exist_ok=True)
    kinds = ["drizzle", "fog", "rain", "snow", "sun"]
    color_of = dict(zip(kinds, ["#aec7e8", "#c7c7c7", "#1f77b4", "#9467bd", "#e7ba52"]))
    days = [date(2012, 1, 1) + timedelta(days=i) for i in range(121)]
    rows = []
    for d in days:
        w = rng.choices(kinds, weights=[1, 1, 4, 1, 3])[0]
        tmax = round(rng.uniform(2, 18) + (d.month - 1) * 1.5, 1)
        tmin = round(tmax - rng.uniform(3, 9), 1)
        prcp = round(rng.uniform(0.5, 30), 1) if w in ("rain", "drizzle", "snow") else 0.0
        wind = round(rng.uniform(0.5, 8), 1)
        rows.append([iso(d), prcp, tmax, tmin, wind, w])
    write_csv(os.path.join(out, "weather.csv"), ["date", "precipitation", "temp_max", "temp_min", "wind", "weather"], rows)
    for name, col, title, ymax in [("scatter_temp", 2, "temp_max", 40), ("scatter_precip", 1, "precipitation", 30)]:
        vals = [r[col] for r in rows]
        cols = [color_of[r[5]] for r in rows]
        svg, xl, yl = d3_time_scatter(760, days, vals, cols, color_of, title, ymax, "weather", kinds)
        with open(os.path.join(out, name + ".svg"), "w") as fh:
            fh.write(svg)
        sidecar = {"toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "scatter", "seed": 20, "title": None,
                   "axes": [{"orientation": "x", "title": "date", "labels": xl}, {"orientation": "y", "title": title, "labels": yl}],
                   "legends": [{"type": "color", "title": "weather", "labels": kinds}],
                   "dataMarks": len(rows), "orientation": "none", "stacking": [],
                   "fields": [{"name": "date", "type": "date"}, {"name": title, "type": "number"}, {"name": "weather", "type": "text"}],
                   "rows": [[r[0], r[col], r[5]] for r in rows], "markCount": count_marks(svg)}
        with open(os.path.join(out, name + ".json"), "w") as fh:
            json.dump(sidecar, fh, indent=1)
            fh.write("\n")
    sums = {k: round(sum(r[2] for r in rows if r[5] == k), 1) for k in kinds}
    c = D3(520, 400, (30, 20, 50, 70))
    band = c.iw / len(kinds)
    top = max(sums.values())
    yt, ystep = nice_ticks(0, top, 5)
    if yt[-1] < top:
        yt.append(yt[-1] + ystep)
    y = linear(0, yt[-1], c.ih, 0)
    c.x_axis([band * (i + 0.5) for i in range(len(kinds))], kinds)
    c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
    for i, k in enumerate(kinds):
        c.add(f'<rect x="{f(band * i + band * 0.1)}" y="{f(y(sums[k]))}" width="{f(band * 0.8)}" height="{f(c.ih - y(sums[k]))}" fill="{color_of[k]}"></rect>')
    c.titles(None, "weather", "Sum of temp_max")
    svg = c.svg()
    with open(os.path.join(out, "bar_weather.svg"), "w") as fh:
        fh.write(svg)
    sidecar = {"toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "bar", "seed": 20, "title": None,
               "axes": [{"orientation": "x", "title": "weather", "labels": kinds},
                        {"orientation": "y", "title": "Sum of temp_max", "labels": [fmt_tick(v) for v in yt]}],
               "legends": [], "dataMarks": len(kinds), "orientation": "vertical", "stacking": [],
               "fields": [{"name": "weather", "type": "text"}, {"name": "Sum of temp_max", "type": "number"}],
               "rows": [[k, sums[k]] for k in kinds], "markCount": count_marks(svg)}
    with open(os.path.join(out, "bar_weather.json"), "w") as fh:
        json.dump(sidecar, fh, indent=1)
        fh.write("\n")
    manifest = {"charts": ["scatter_temp.svg", "scatter_precip.svg", "bar_weather.svg"], "data": "weather.csv",
                "options": {"epsilon": 0.01, "budget": 10000}}
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    expected = {"schema": "chartseam/1", "nodes": [
        {"view": "external", "sources": [], "targets": ["scatter_temp", "scatter_precip", "bar_weather"]},
        {"view": "scatter_temp", "sources": [], "targets": ["external", "scatter_precip"]},
        {"view": "scatter_precip", "sources": [], "targets": ["external", "scatter_temp"]},
        {"view": "bar_weather", "sources": [{"from": "external", "transforms": ["groupby(weather)", "sum(temp_max)"], "matchedFields": 2}], "targets": []},
    ], "directMatchedFields": {"scatter_temp": 3, "scatter_precip": 3}}
    with open(os.path.join(out, "expected_graph.json"), "w") as fh:
        json.dump(expected, fh, indent=1)
        fh.write("\n")


def scatter_quartet():
    rng = random.Random(21)
    out = os.path.join(ROOT, "suites", "scatter-quartet")
    os.makedirs(out, exist_ok=True)
    rows = []
    for i in range(60):
        cyl = rng.choice([4, 6, 8])
        weight = round(1600 + 350 * cyl + rng.uniform(-300, 300), 0)
        hp = round(20 + 18 * cyl + rng.uniform(-15, 15), 0)
        disp = round(25 * cyl * 1.6 + rng.uniform(-30, 30), 0)
        acc = round(21 - 0.9 * cyl + rng.uniform(-2, 2), 1)
        rows.append([f"car-{i:02d}", cyl, weight, hp, disp, acc])
    write_csv(os.path.join(out, "cars.csv"), ["name", "cylinders", "weight", "horsepower", "displacement", "acceleration"], rows)
    cyl_col = {4: "#4e79a7", 6: "#f28e2c", 8: "#e15759"}
    pairs = [("weight_hp", 2, 3), ("disp_acc", 4, 5), ("weight_acc", 2, 5), ("hp_disp", 3, 4)]
    names = ["name", "cylinders", "weight", "horsepower", "displacement", "acceleration"]
    charts = []
    for vname, xi, yi in pairs:
        xs = [r[xi] for r in rows]
        ys = [r[yi] for r in rows]
        c = D3(460, 360, (20, 90, 45, 55))
        xt, xstep = nice_ticks(min(xs), max(xs), 5)
        xt = [xt[0] - xstep] + xt if xt[0] > min(xs) else xt
        xt = xt + [xt[-1] + xstep] if xt[-1] < max(xs) else xt
        yt, ystep = nice_ticks(min(ys), max(ys), 5)
        yt = [yt[0] - ystep] + yt if yt[0] > min(ys) else yt
        yt = yt + [yt[-1] + ystep] if yt[-1] < max(ys) else yt
        x = linear(xt[0], xt[-1], 0, c.iw)
        y = linear(yt[0], yt[-1], c.ih, 0)
        c.x_axis([x(v) for v in xt], [f"{v:,.0f}" if abs(v) >= 1000 else fmt_tick(v) for v in xt])
        c.y_axis([y(v) for v in yt], [f"{v:,.0f}" if abs(v) >= 1000 else fmt_tick(v) for v in yt])
        for r in rows:
            c.add(f'<circle cx="{f(x(r[xi]))}" cy="{f(y(r[yi]))}" r="3" fill="{cyl_col[r[1]]}" fill-opacity="0.7"></circle>')
        c.color_legend(c.iw + 16, 12, ["4", "6", "8"], [cyl_col[k] for k in (4, 6, 8)], "cylinders", shape="circle")
        c.titles(None, names[xi], names[yi])
        svg = c.svg()
        with open(os.path.join(out, vname + ".svg"), "w") as fh:
            fh.write(svg)
        sidecar = {"toolchain": "d3-style (Observable Plot-like layout)", "chartType": "scatter", "seed": 21, "title": None,
                   "axes": [{"orientation": "x", "title": names[xi], "labels": None}, {"orientation": "y", "title": names[yi], "labels": None}],
                   "legends": [{"type": "color", "title": "cylinders", "labels": ["4", "6", "8"]}],
                   "dataMarks": len(rows), "orientation": "none", "stacking": [],
                   "fields": [{"name": names[xi], "type": "number"}, {"name": names[yi], "type": "number"}, {"name": "cylinders", "type": "number"}],
                   "rows": [[r[xi], r[yi], r[1]] for r in rows], "markCount": count_marks(svg)}
        with open(os.path.join(out, vname + ".json"), "w") as fh:
            json.dump(sidecar, fh, indent=1)
            fh.write("\n")
        charts.append(vname)
    manifest = {"charts": [c + ".svg" for c in charts], "data": "cars.csv", "options": {"epsilon": 0.01, "budget": 10000}}
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    expected = {"schema": "chartseam/1", "nodes": [{"view": "external", "sources": [], "targets": charts}] +
                [{"view": c, "sources": [], "targets": ["external"]} for c in charts],
                "directMatchedFields": {c: 3 for c in charts}}
    with open(os.path.join(out, "expected_graph.json"), "w") as fh:
        json.dump(expected, fh, indent=1)
        fh.write("\n")
    script = [
        {"chart": "weight_hp", "target": "background", "type": "brush", "mode": "brush",
         "params": {"rect": [0, 0, 0, 0]}},
    ]


def stdev(xs):
    m = sum(xs) / len(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def crossfilter_trio():
    rng = random.Random(22)
    out = os.path.join(ROOT, "suites", "crossfilter-trio")
    os.makedirs(out, exist_ok=True)
    rows = []
    for i in range(300):
        dist = round(min(1999.0, max(1.0, rng.gauss(900, 380))), 0)
        delay = round(min(79.0, max(-19.0, rng.gauss(15 + dist / 200, 22))), 0)
        hour = round(rng.uniform(5.0, 22.99), 2)
        rows.append([dist, delay, hour])
    write_csv(os.path.join(out, "flights.csv"), ["distance", "delay", "time"], rows)

    def histogram(vname, col, edges, agg, agg_col, xtitle, ytitle, xticks):
        groups = []
        for lo, hi in zip(edges, edges[1:]):
            last = hi == edges[-1]
            members = [r for r in rows if lo <= r[col] < hi or (last and r[col] == hi)]
            groups.append((lo, hi, members))
        if agg == "count":
            vals = [len(m) for _, _, m in groups]
        else:
            vals = [stdev([r[agg_col] for r in m]) for _, _, m in groups]
        c = D3(480, 300, (20, 20, 45, 55))
        x = linear(edges[0], edges[-1], 0, c.iw)
        top = max(vals)
        yt, ystep = nice_ticks(0, top, 4)
        if yt[-1] < top:
            yt.append(yt[-1] + ystep)
        y = linear(0, yt[-1], c.ih, 0)
        c.x_axis([x(v) for v in xticks], [fmt_tick(v) for v in xticks])
        c.y_axis([y(v) for v in yt], [fmt_tick(v) for v in yt])
        srows = []
        for (lo, hi, m), v in zip(groups, vals):
            assert m, "empty bin"
            c.add(f'<rect x="{f(x(lo) + 1)}" width="{f(x(hi) - x(lo) - 1)}" y="{f(y(v))}" height="{f(c.ih - y(v))}" fill="#4c78a8"></rect>')
            srows.append([f"[{fmt_tick(lo)}, {fmt_tick(hi)}{']' if hi == edges[-1] else ')'}", round(v, 6)])
        c.titles(None, xtitle, ytitle)
        svg = c.svg()
        with open(os.path.join(out, vname + ".svg"), "w") as fh:
            fh.write(svg)
        sidecar = {"toolchain": "d3-style (d3 v7 axis conventions)", "chartType": "histogram", "seed": 22, "title": None,
                   "axes": [{"orientation": "x", "title": xtitle, "labels": [fmt_tick(v) for v in xticks]},
                            {"orientation": "y", "title": ytitle, "labels": [fmt_tick(v) for v in yt]}],
                   "legends": [], "dataMarks": len(srows), "orientation": "vertical", "stacking": [],
                   "bins": [[lo, hi] for lo, hi in zip(edges, edges[1:])],
                   "fields": [{"name": xtitle, "type": "text"}, {"name": ytitle, "type": "number"}],
                   "rows": srows, "markCount": count_marks(svg)}
        with open(os.path.join(out, vname + ".json"), "w") as fh:
            json.dump(sidecar, fh, indent=1)
            fh.write("\n")

    histogram("distance_hist", 0, list(range(0, 2001, 200)), "count", None, "distance", "flights", list(range(0, 2001, 400)))
    histogram("delay_hist", 1, list(range(-20, 81, 20)), "count", None, "delay", "flights", list(range(-20, 81, 20)))
    histogram("time_stdev", 2, list(range(4, 25, 2)), "stdev", 1, "time", "delay stdev", list(range(4, 25, 4)))
    charts = ["distance_hist", "delay_hist", "time_stdev"]
    manifest = {"charts": [c + ".svg" for c in charts], "data": "flights.csv", "options": {"epsilon": 0.01, "budget": 10000}}
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    expected = {"schema": "chartseam/1", "nodes": [
        {"view": "external", "sources": [], "targets": charts},
        {"view": "distance_hist", "sources": [{"from": "external", "transforms": ["bin(distance)", "groupby(bin_distance)", "count"], "matchedFields": 2}], "targets": []},
        {"view": "delay_hist", "sources": [{"from": "external", "transforms": ["bin(delay)", "groupby(bin_delay)", "count"], "matchedFields": 2}], "targets": []},
        {"view": "time_stdev", "sources": [{"from": "external", "transforms": ["bin(time)", "groupby(bin_time)", "stdev(delay)"], "matchedFields": 2}], "targets": []},
    ]}
    with open(os.path.join(out, "expected_graph.json"), "w") as fh:
        json.dump(expected, fh, indent=1)
        fh.write("\n")


def main():
    d3_bar_basic()
    d3_scatter()
    d3_multiline()
    d3_stacked_bar()
    d3_histogram()
    d3_bubble()
    d3_log_scatter()
    d3_diverging()
    vega_grouped_bar()
    vega_scatter_color()
    vega_stacked_area()
    vega_hbar()
    gg_lines()
    gg_col()
    mpl_line()
    mpl_bar()
    mpl_scatter()
    mpl_area()
    weather_trio()
    scatter_quartet()
    crossfilter_trio()


if __name__ == "__main__":
    main()

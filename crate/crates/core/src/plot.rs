//! Deterministic SVG rendering of maps and sweep results: energy heatmaps
//! with equilibrium overlays, cage-vs-tip scatters, parameter-range grids,
//! metric bar charts, and best-design galleries.
//!
//! Output is plain SVG text built with fixed-precision formatting, so
//! identical inputs produce identical bytes.

use std::fmt::Write;

use crate::energy_map::EnergyMap;
use crate::geom::Vec2;
use crate::kinematics::{finger_chain, FingerConfig, GrasperDesign, Side};
use crate::manipulation::ParameterRanges;
use crate::scalar::Real;
use crate::sweep::CageTipRow;

fn f(v: f64) -> String {
    format!("{v:.3}")
}

struct Svg {
    buf: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        let mut buf = String::new();
        let _ = write!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
             viewBox=\"0 0 {} {}\">\n",
            f(width),
            f(height),
            f(width),
            f(height)
        );
        Self { buf, width, height }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = write!(
            self.buf,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            f(x),
            f(y),
            f(w),
            f(h),
            fill
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = write!(
            self.buf,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            f(x1),
            f(y1),
            f(x2),
            f(y2),
            stroke,
            f(width)
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = write!(
            self.buf,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
            f(cx),
            f(cy),
            f(r),
            fill
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", f(*x), f(*y))).collect();
        let _ = write!(
            self.buf,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            coords.join(" "),
            stroke,
            f(width)
        );
    }

    fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let escaped = content
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = write!(
            self.buf,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"monospace\">{}</text>\n",
            f(x),
            f(y),
            f(size),
            escaped
        );
    }

    fn warn_empty(&mut self, message: &str) {
        let (w, h) = (self.width, self.height);
        self.rect(0.0, 0.0, w, h, "#f8f8f8");
        self.text(20.0, h / 2.0, 14.0, message);
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Dark-to-light ramp: low values dark, high values light.
fn energy_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| a + (b - a) * t;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(24.0, 242.0) as u8,
        lerp(28.0, 234.0) as u8,
        lerp(66.0, 211.0) as u8
    )
}

const UNREACHABLE_FILL: &str = "#ffffff";
const HATCH_STROKE: &str = "#c0392b";
const OUTLINE_STROKE: &str = "#2c3e50";

/// Heatmap of one energy map: low energy dark, unreachable cells white,
/// equilibrium cells hatched, and the rest-pose grasper outline overlaid.
pub fn energy_heatmap<T: Real>(map: &EnergyMap<T>) -> String {
    let g = &map.grid;
    let to = |v: T| v.to_f64().unwrap_or(0.0);
    let (dx, dy) = (to(g.dx), to(g.dy));
    let (x_lo, y_lo) = (to(g.x0) - dx / 2.0, to(g.y0) - dy / 2.0);
    let (x_hi, y_hi) = (to(g.x_max()) + dx / 2.0, to(g.y_max()) + dy / 2.0);
    let margin = 24.0;
    let plot_w = 640.0;
    let scale = plot_w / (x_hi - x_lo);
    let plot_h = (y_hi - y_lo) * scale;
    let mut svg = Svg::new(plot_w + 2.0 * margin, plot_h + 2.0 * margin + 18.0);
    if g.len() == 0 {
        svg.warn_empty("empty grid: nothing to draw");
        return svg.finish();
    }
    let sx = |x: f64| margin + (x - x_lo) * scale;
    let sy = |y: f64| margin + (y_hi - y) * scale;

    let values: Vec<f64> = map
        .cells
        .iter()
        .filter_map(|cell| cell.v.map(&to))
        .collect();
    let v_lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let v_hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if v_hi > v_lo { v_hi - v_lo } else { 1.0 };

    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let cell = map.cell(ix, iy);
            let p = g.point(ix, iy);
            let (cx, cy) = (to(p.x), to(p.y));
            let fill = match cell.v {
                Some(v) => energy_color((to(v) - v_lo) / span),
                None => UNREACHABLE_FILL.into(),
            };
            let x = sx(cx - dx / 2.0);
            let y = sy(cy + dy / 2.0);
            let (w, h) = (dx * scale, dy * scale);
            svg.rect(x, y, w, h, &fill);
            if cell.equilibrium {
                svg.line(x, y + h, x + w, y, HATCH_STROKE, 1.0);
                svg.line(x, y + h / 2.0, x + w / 2.0, y, HATCH_STROKE, 0.6);
                svg.line(x + w / 2.0, y + h, x + w, y + h / 2.0, HATCH_STROKE, 0.6);
            }
        }
    }

    // Rest-pose grasper outline: palm plus both finger chains.
    let design = &map.design;
    let (t1, t2) = design.rest_pose();
    let chain = |side: Side| {
        let config = FingerConfig::free(side, t1, t2);
        let (base, joint2, tip) = finger_chain(design, &config);
        let pt = |v: Vec2<T>| (sx(to(v.x)), sy(to(v.y)));
        vec![pt(base), pt(joint2), pt(tip)]
    };
    let left = chain(Side::Left);
    let right = chain(Side::Right);
    svg.line(left[0].0, left[0].1, right[0].0, right[0].1, OUTLINE_STROKE, 2.0);
    svg.polyline(&left, OUTLINE_STROKE, 2.0);
    svg.polyline(&right, OUTLINE_STROKE, 2.0);

    svg.text(
        margin,
        plot_h + 2.0 * margin + 12.0,
        11.0,
        &format!("V range [{}, {}], dark = low", f(v_lo), f(v_hi)),
    );
    svg.finish()
}

/// Scatter of caged-point versus tip-prehension counts, one circle per
/// (design, object) row.
pub fn cage_tip_scatter<T: Real>(rows: &[CageTipRow<T>]) -> String {
    let (w, h, margin) = (480.0, 480.0, 48.0);
    let mut svg = Svg::new(w, h);
    if rows.is_empty() {
        svg.warn_empty("no sweep rows: nothing to plot");
        return svg.finish();
    }
    let max_x = rows.iter().map(|r| r.n_tip).max().unwrap().max(1) as f64;
    let max_y = rows.iter().map(|r| r.n_caged).max().unwrap().max(1) as f64;
    let sx = |v: f64| margin + v / max_x * (w - 2.0 * margin);
    let sy = |v: f64| h - margin - v / max_y * (h - 2.0 * margin);
    svg.line(margin, h - margin, w - margin, h - margin, "#333333", 1.0);
    svg.line(margin, margin, margin, h - margin, "#333333", 1.0);
    svg.text(w / 2.0 - 60.0, h - 12.0, 11.0, "tip prehension points");
    svg.text(8.0, margin - 12.0, 11.0, "caging points");
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
    for row in rows {
        let color = palette[row.object_index % palette.len()];
        svg.circle(sx(row.n_tip as f64), sy(row.n_caged as f64), 3.0, color);
    }
    svg.finish()
}

/// One labeled row of relative parameter ranges in [0, 1].
pub struct RangeRow<T> {
    pub label: String,
    pub ranges: ParameterRanges<T>,
}

/// Heat-grid of per-parameter relative ranges, one row per entry and one
/// column per design parameter.
pub fn parameter_range_grid<T: Real>(rows: &[RangeRow<T>]) -> String {
    let cols = ["l1", "l2", "r1", "r2", "w"];
    let (cell, label_w, header_h) = (56.0, 140.0, 24.0);
    let w = label_w + cols.len() as f64 * cell + 16.0;
    let h = header_h + rows.len().max(1) as f64 * cell + 16.0;
    let mut svg = Svg::new(w, h);
    if rows.is_empty() {
        svg.warn_empty("no evaluations: nothing to plot");
        return svg.finish();
    }
    for (ci, name) in cols.iter().enumerate() {
        svg.text(label_w + ci as f64 * cell + cell / 2.0 - 6.0, 16.0, 11.0, name);
    }
    for (ri, row) in rows.iter().enumerate() {
        let y = header_h + ri as f64 * cell;
        svg.text(8.0, y + cell / 2.0 + 4.0, 11.0, &row.label);
        let r = &row.ranges;
        let vals = [r.l1, r.l2, r.r1, r.r2, r.w];
        for (ci, v) in vals.iter().enumerate() {
            let t = v.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
            svg.rect(
                label_w + ci as f64 * cell,
                y,
                cell - 2.0,
                cell - 2.0,
                &energy_color(1.0 - t),
            );
            svg.text(
                label_w + ci as f64 * cell + 8.0,
                y + cell / 2.0 + 4.0,
                10.0,
                &f(t),
            );
        }
    }
    svg.finish()
}

/// One cluster of bars sharing a label (typically one object).
pub struct BarGroup {
    pub label: String,
    /// (series label, value) pairs drawn side by side.
    pub bars: Vec<(String, f64)>,
}

/// Grouped bar chart; zero-valued bars render with zero height.
pub fn metric_bars(groups: &[BarGroup]) -> String {
    let (h, margin) = (360.0, 48.0);
    let bar_w = 26.0;
    let group_gap = 24.0;
    let bars_per = groups.iter().map(|g| g.bars.len()).max().unwrap_or(1) as f64;
    let group_w = bars_per * (bar_w + 4.0) + group_gap;
    let w = margin * 2.0 + groups.len().max(1) as f64 * group_w;
    let mut svg = Svg::new(w, h);
    if groups.is_empty() || groups.iter().all(|g| g.bars.is_empty()) {
        svg.warn_empty("no metric values: nothing to plot");
        return svg.finish();
    }
    let max_v = groups
        .iter()
        .flat_map(|g| g.bars.iter().map(|(_, v)| *v))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];
    let base_y = h - margin;
    svg.line(margin / 2.0, base_y, w - margin / 2.0, base_y, "#333333", 1.0);
    for (gi, group) in groups.iter().enumerate() {
        let x0 = margin + gi as f64 * group_w;
        for (bi, (series, value)) in group.bars.iter().enumerate() {
            let bh = (value / max_v) * (h - 2.0 * margin);
            let x = x0 + bi as f64 * (bar_w + 4.0);
            if bh > 0.0 {
                svg.rect(x, base_y - bh, bar_w, bh, palette[bi % palette.len()]);
            }
            if gi == 0 {
                svg.rect(w - margin - 90.0, 16.0 + bi as f64 * 16.0, 10.0, 10.0, palette[bi % palette.len()]);
                svg.text(w - margin - 74.0, 25.0 + bi as f64 * 16.0, 10.0, series);
            }
        }
        svg.text(x0, base_y + 16.0, 10.0, &group.label);
    }
    svg.finish()
}

/// Gallery of labeled designs drawn at rest pose, for the best design per
/// object; underlays each design's energy map when provided.
pub fn best_design_gallery<T: Real>(
    items: &[(String, GrasperDesign<T>, Option<&EnergyMap<T>>)],
) -> String {
    let tile = 240.0;
    let cols = 4usize;
    let rows = items.len().div_ceil(cols).max(1);
    let w = cols as f64 * tile;
    let h = rows as f64 * (tile + 20.0);
    let mut svg = Svg::new(w, h);
    if items.is_empty() {
        svg.warn_empty("no designs: nothing to draw");
        return svg.finish();
    }
    let to = |v: T| v.to_f64().unwrap_or(0.0);
    for (i, (label, design, map)) in items.iter().enumerate() {
        let (col, row) = (i % cols, i / cols);
        let ox = col as f64 * tile;
        let oy = row as f64 * (tile + 20.0);
        let extent = to(design.w) / 2.0 + to(design.l1) + to(design.l2);
        let scale = (tile - 24.0) / (2.0 * extent).max(1e-9);
        let sx = |x: f64| ox + tile / 2.0 + x * scale;
        let sy = |y: f64| oy + tile - 12.0 - (y + extent * 0.1) * scale;
        if let Some(map) = map {
            // Miniature underlay: reachable cells as faint points.
            let g = &map.grid;
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    if map.cell(ix, iy).reachable {
                        let p = g.point(ix, iy);
                        let fill = if map.cell(ix, iy).equilibrium {
                            HATCH_STROKE
                        } else {
                            "#cccccc"
                        };
                        svg.circle(sx(to(p.x)), sy(to(p.y)), 1.2, fill);
                    }
                }
            }
        }
        let (t1, t2) = design.rest_pose();
        let chain = |side: Side| {
            let config = FingerConfig::free(side, t1, t2);
            let (base, joint2, tip) = finger_chain(design, &config);
            vec![
                (sx(to(base.x)), sy(to(base.y))),
                (sx(to(joint2.x)), sy(to(joint2.y))),
                (sx(to(tip.x)), sy(to(tip.y))),
            ]
        };
        let left = chain(Side::Left);
        let right = chain(Side::Right);
        svg.line(left[0].0, left[0].1, right[0].0, right[0].1, OUTLINE_STROKE, 2.0);
        svg.polyline(&left, OUTLINE_STROKE, 2.0);
        svg.polyline(&right, OUTLINE_STROKE, 2.0);
        svg.text(ox + 8.0, oy + tile + 8.0, 10.0, label);
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact_solver::ActuationCommand;
    use crate::energy_map::{build_energy_map, GridSpec};
    use crate::kinematics::ObjectSpec;

    fn sample_map() -> EnergyMap<f64> {
        let design = GrasperDesign::new(1.2, 0.8, 0.08, 0.06, 1.2).unwrap();
        let object = ObjectSpec::new(0.4, 0.5).unwrap();
        let grid = GridSpec::with_resolution(&design, &object, 0.3);
        build_energy_map(&design, &object, &ActuationCommand::symmetric(1.0), grid).unwrap()
    }

    fn assert_well_formed(svg: &str) {
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        for tag in ["rect", "line", "circle", "polyline", "text"] {
            let opens = svg.matches(&format!("<{tag} ")).count();
            let closes = svg.matches("/>").count() + svg.matches(&format!("</{tag}>")).count();
            assert!(closes >= opens, "unclosed <{tag}>");
        }
    }

    #[test]
    fn heatmap_is_deterministic_and_overlays_equilibrium() {
        let map = sample_map();
        let svg = energy_heatmap(&map);
        assert_well_formed(&svg);
        assert_eq!(svg, energy_heatmap(&map));
        assert!(map.equilibrium_count() > 0);
        assert!(svg.contains(HATCH_STROKE));
        assert!(svg.contains(OUTLINE_STROKE));
        // One rect per grid cell plus chrome.
        assert!(svg.matches("<rect ").count() >= map.grid.len());
    }

    #[test]
    fn scatter_counts_points() {
        let rows: Vec<CageTipRow<f64>> = (0..7)
            .map(|i| CageTipRow {
                object_index: i % 2,
                object: ObjectSpec::new(0.4, 0.1).unwrap(),
                design_index: i,
                n_caged: 3 * i,
                n_tip: 20 - i,
            })
            .collect();
        let svg = cage_tip_scatter(&rows);
        assert_well_formed(&svg);
        assert_eq!(svg.matches("<circle ").count(), rows.len());
        let empty = cage_tip_scatter::<f64>(&[]);
        assert!(empty.contains("nothing to plot"));
    }

    #[test]
    fn range_grid_clamps_and_labels() {
        let rows = vec![RangeRow {
            label: "object r=0.4".into(),
            ranges: ParameterRanges {
                l1: 0.5,
                l2: 1.7, // out of range on purpose
                r1: -0.2,
                r2: 1.0,
                w: 0.0,
            },
        }];
        let svg = parameter_range_grid(&rows);
        assert_well_formed(&svg);
        assert!(svg.contains(">1.000<"));
        assert!(!svg.contains(">1.700<"));
        assert!(!svg.contains(">-0.200<"));
        assert!(svg.contains("object r=0.4"));
    }

    #[test]
    fn bars_render_zero_heights() {
        let groups = vec![
            BarGroup {
                label: "r=1.6 mu=0.7".into(),
                bars: vec![("A".into(), 0.0), ("B".into(), 0.0)],
            },
            BarGroup {
                label: "r=0.4 mu=0.1".into(),
                bars: vec![("A".into(), 2.0), ("B".into(), 1.0)],
            },
        ];
        let svg = metric_bars(&groups);
        assert_well_formed(&svg);
        // Two value bars plus two legend swatches.
        assert_eq!(svg.matches("<rect ").count(), 4);
        assert!(metric_bars(&[]).contains("nothing to plot"));
    }

    #[test]
    fn gallery_draws_each_design() {
        let map = sample_map();
        let d1 = map.design.clone();
        let d2 = GrasperDesign::new(2.0, 1.6, 0.2, 0.14, 2.0).unwrap();
        let items = vec![
            ("best for r=0.4".to_string(), d1, Some(&map)),
            ("best for r=1.6".to_string(), d2, None),
        ];
        let svg = best_design_gallery(&items);
        assert_well_formed(&svg);
        // Two palm lines plus four finger polylines.
        assert_eq!(svg.matches("<polyline ").count(), 4);
        assert!(svg.contains("best for r=0.4"));
        assert!(best_design_gallery::<f64>(&[]).contains("nothing to draw"));
    }
}

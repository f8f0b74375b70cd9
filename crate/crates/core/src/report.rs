//! Serialized outputs: boundary curves and phase diagrams as CSV, JSON and
//! SVG.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes. Missing values are empty CSV fields
//! and `null` in JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::boundary::{BoundarySolution, CurvePoint};
use crate::phase::PhaseDiagram;
use crate::prob::{marginal_p_y1, ModelParams, QuadratureRule};

/// One row of a boundary table. `h`, `t0`, `t1` hold the last iterate when
/// the solver did not converge and are absent when it failed outright.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_y1: Option<f64>,
    pub gamma: f64,
    pub h: Option<f64>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Table rows for a computed curve; with `prob_axis` each row also carries
/// the marginal `P(y = 1)` at its parameters.
pub fn boundary_rows(rho: f64, points: &[CurvePoint], prob_axis: bool, rule: &QuadratureRule) -> Vec<BoundaryRow> {
    points
        .iter()
        .map(|pt| {
            let best: Option<&BoundarySolution> = pt.best_effort();
            let p_y1 = if prob_axis {
                ModelParams::from_rho_gamma(rho, pt.gamma)
                    .ok()
                    .map(|params| marginal_p_y1(&params, rule))
            } else {
                None
            };
            BoundaryRow {
                p_y1,
                gamma: pt.gamma,
                h: best.map(|s| s.h),
                t0: best.map(|s| s.t_star[0]),
                t1: best.map(|s| s.t_star[1]),
                converged: matches!(pt.solution, Ok(ref s) if s.converged),
                error: pt.solution.as_ref().err().map(ToString::to_string),
            }
        })
        .collect()
}

/// `gamma,h,t0,t1,converged`, prefixed by `p_y1` when present.
pub fn boundary_csv(rows: &[BoundaryRow]) -> String {
    let prob_axis = rows.iter().any(|r| r.p_y1.is_some());
    let mut out = String::new();
    if prob_axis {
        out.push_str("p_y1,");
    }
    out.push_str("gamma,h,t0,t1,converged\n");
    for r in rows {
        if prob_axis {
            let _ = write!(out, "{},", opt(r.p_y1));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.gamma),
            opt(r.h),
            opt(r.t0),
            opt(r.t1),
            r.converged
        );
    }
    out
}

#[derive(Serialize)]
struct BoundaryDoc<'a, C: Serialize> {
    config: &'a C,
    rows: &'a [BoundaryRow],
}

/// `{"config": ..., "rows": [...]}`.
pub fn boundary_json<C: Serialize>(config: &C, rows: &[BoundaryRow]) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&BoundaryDoc { config, rows })?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => num(x),
        _ => String::new(),
    }
}

/// Shortest round-trip digits, switching to exponent form for tiny values.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-5 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// `kappa,gamma,replicates,exists_count,p_hat`, one row per cell in the
/// diagram's order.
pub fn diagram_csv(diagram: &PhaseDiagram) -> String {
    let mut out = String::from("kappa,gamma,replicates,exists_count,p_hat\n");
    for c in &diagram.cells {
        let p_hat = if c.p_hat.is_finite() { num(c.p_hat) } else { String::new() };
        let _ = writeln!(out, "{},{},{},{},{}", num(c.kappa), num(c.gamma), c.replicates, c.exists_count, p_hat);
    }
    out
}

/// The whole diagram, grid spec included.
pub fn diagram_json(diagram: &PhaseDiagram) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(diagram)?;
    s.push('\n');
    Ok(s)
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 16.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Heatmap of `p_hat` with `kappa` across and `gamma` up: white is 1, black
/// is 0, cells without an estimate are left unpainted. `curve` holds
/// `(gamma, h)` pairs drawn as a red polyline.
pub fn diagram_svg(diagram: &PhaseDiagram, curve: &[(f64, f64)]) -> String {
    let kappas = sorted_unique(diagram.cells.iter().map(|c| c.kappa));
    let gammas = sorted_unique(diagram.cells.iter().map(|c| c.gamma));
    let kx = cell_edges(&kappas);
    let gy = cell_edges(&gammas);
    let (x0, x1) = (kx[0], kx[kx.len() - 1]);
    let (y0, y1) = (gy[0], gy[gy.len() - 1]);
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |k: f64| MARGIN_LEFT + (k - x0) / (x1 - x0) * plot_w;
    let sy = |g: f64| MARGIN_TOP + (y1 - g) / (y1 - y0) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="plot"><rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}"/></clipPath></defs>"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for c in &diagram.cells {
        if !c.p_hat.is_finite() {
            continue;
        }
        let i = kappas.iter().position(|&k| k == c.kappa).unwrap_or(0);
        let j = gammas.iter().position(|&g| g == c.gamma).unwrap_or(0);
        let (left, right) = (sx(kx[i]), sx(kx[i + 1]));
        let (top, bottom) = (sy(gy[j + 1]), sy(gy[j]));
        let shade = (255.0 * c.p_hat.clamp(0.0, 1.0)).round() as u8;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{shade:02x}{shade:02x}{shade:02x}"/>"##,
            left,
            top,
            right - left,
            bottom - top
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#000000"/>"##
    );

    let points: Vec<String> = curve
        .iter()
        .filter(|(g, h)| g.is_finite() && h.is_finite())
        .map(|&(g, h)| format!("{:.2},{:.2}", sx(h), sy(g)))
        .collect();
    if !points.is_empty() {
        let _ = writeln!(
            out,
            r##"<polyline clip-path="url(#plot)" fill="none" stroke="#ff0000" stroke-width="2" points="{}"/>"##,
            points.join(" ")
        );
    }

    let _ = writeln!(out, r##"<g font-family="sans-serif" font-size="11" fill="#000000">"##);
    for &k in &kappas {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(k),
            SVG_HEIGHT - MARGIN_BOTTOM + 16.0,
            tick(k)
        );
    }
    for &g in &gammas {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(g),
            tick(g)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">κ</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 8.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-size="14">γ</text>"#,
        MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Boundaries of cells centred on `centers`: midpoints inside, half a
/// neighbouring gap beyond each end.
fn cell_edges(centers: &[f64]) -> Vec<f64> {
    match centers {
        [] => vec![0.0, 1.0],
        [c] => vec![c - 0.5, c + 0.5],
        _ => {
            let n = centers.len();
            let mut edges = Vec::with_capacity(n + 1);
            edges.push(centers[0] - (centers[1] - centers[0]) / 2.0);
            for w in centers.windows(2) {
                edges.push((w[0] + w[1]) / 2.0);
            }
            edges.push(centers[n - 1] + (centers[n - 1] - centers[n - 2]) / 2.0);
            edges
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{CellEstimate, GridSpec};

    fn diagram() -> PhaseDiagram {
        let cell = |kappa, gamma, exists_count, replicates: usize| CellEstimate {
            kappa,
            gamma,
            p: 1,
            replicates,
            exists_count,
            p_hat: if replicates == 0 { f64::NAN } else { exists_count as f64 / replicates as f64 },
            failures: Vec::new(),
        };
        PhaseDiagram {
            spec: GridSpec::desk(0.0, 1),
            cells: vec![cell(0.1, 0.0, 4, 4), cell(0.2, 0.0, 1, 4), cell(0.1, 1.0, 2, 4), cell(0.2, 1.0, 0, 0)],
        }
    }

    #[test]
    fn diagram_csv_layout() {
        let csv = diagram_csv(&diagram());
        assert_eq!(
            csv,
            "kappa,gamma,replicates,exists_count,p_hat\n0.1,0,4,4,1\n0.2,0,4,1,0.25\n0.1,1,4,2,0.5\n0.2,1,0,0,\n"
        );
    }

    #[test]
    fn svg_shades_and_curve() {
        let svg = diagram_svg(&diagram(), &[(0.0, 0.15), (1.0, 0.12)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("fill=\"#ffffff\"/>"));
        assert!(svg.contains("fill=\"#404040\""));
        assert!(svg.contains("fill=\"#808080\""));
        assert_eq!(svg.matches("<rect x=").count(), 5, "clip, three painted cells, frame");
        assert!(svg.contains("stroke=\"#ff0000\""));
    }

    #[test]
    fn edges() {
        assert_eq!(cell_edges(&[1.0, 2.0, 4.0]), vec![0.5, 1.5, 3.0, 5.0]);
        assert_eq!(cell_edges(&[3.0]), vec![2.5, 3.5]);
        assert_eq!(tick(0.05), "0.05");
        assert_eq!(tick(10.0), "10");
        assert_eq!(num(2.5e-17), "2.5e-17");
        assert_eq!(num(-0.25), "-0.25");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn boundary_csv_optional_fields() {
        let rows = vec![
            BoundaryRow { p_y1: None, gamma: 0.0, h: Some(0.5), t0: Some(0.0), t1: Some(0.0), converged: true, error: None },
            BoundaryRow { p_y1: None, gamma: 1.0, h: None, t0: None, t1: None, converged: false, error: Some("x".into()) },
        ];
        assert_eq!(boundary_csv(&rows), "gamma,h,t0,t1,converged\n0,0.5,0,0,true\n1,,,,false\n");
    }
}

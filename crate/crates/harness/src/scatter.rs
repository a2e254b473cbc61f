use std::fmt::Write as _;
use std::io::Write;

use morl_metrics::{MetricsError, SolutionSet};

use crate::Result;

/// One row per (objective, weight point): `objective,w,mean_return`.
pub fn write_scatter_csv<W: Write>(mut out: W, set: &SolutionSet) -> Result<()> {
    let dim = set.dim().ok_or(MetricsError::Empty("solution set"))?;
    writeln!(out, "objective,w,mean_return")?;
    for d in 0..dim {
        for e in set.entries() {
            writeln!(out, "{d},{},{}", e.weight[d], e.ret[d])?;
        }
    }
    Ok(())
}

const PANEL: f64 = 240.0;
const MARGIN: f64 = 40.0;

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (mean, (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt())
}

/// One panel per objective: return against that objective's weight. Each
/// baseline is drawn as a horizontal band at its mean return ± one
/// standard deviation across weight points.
pub fn render_scatter_svg(set: &SolutionSet, baselines: &[SolutionSet], objective_names: &[String]) -> Result<String> {
    let dim = set.dim().ok_or(MetricsError::Empty("solution set"))?;
    let width = dim as f64 * (PANEL + MARGIN) + MARGIN;
    let height = PANEL + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    for d in 0..dim {
        let column = |s: &SolutionSet| s.entries().iter().map(|e| e.ret[d]).collect::<Vec<f64>>();
        let bands: Vec<(f64, f64)> = baselines.iter().filter(|b| !b.is_empty()).map(|b| mean_std(&column(b))).collect();
        let values = column(set);
        let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &(m, s) in &bands {
            lo = lo.min(m - s);
            hi = hi.max(m + s);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let x0 = MARGIN + d as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        let px = |w: f64| x0 + w * PANEL;
        let py = |v: f64| y0 + PANEL - (v - lo) / (hi - lo) * PANEL;
        let _ = writeln!(svg, r#"<g><rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#);
        for &(m, s) in &bands {
            let (top, bottom) = (py(m + s), py(m - s));
            let _ = writeln!(
                svg,
                r##"<rect x="{x0}" y="{top}" width="{PANEL}" height="{}" fill="#999999" fill-opacity="0.3"/><line x1="{x0}" x2="{}" y1="{}" y2="{}" stroke="#666666"/>"##,
                bottom - top,
                x0 + PANEL,
                py(m),
                py(m)
            );
        }
        for e in set.entries() {
            let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="3" fill="#1f77b4"/>"##, px(e.weight[d]), py(e.ret[d]));
        }
        let name = objective_names.get(d).cloned().unwrap_or_else(|| format!("objective {d}"));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{name}</text><text x="{x0}" y="{}">0</text><text x="{}" y="{}" text-anchor="end">1</text><text x="{}" y="{}" text-anchor="end">{hi:.3}</text><text x="{}" y="{}" text-anchor="end">{lo:.3}</text></g>"#,
            x0 + PANEL / 2.0,
            y0 - 10.0,
            y0 + PANEL + 14.0,
            x0 + PANEL,
            y0 + PANEL + 14.0,
            x0 - 3.0,
            y0 + 4.0,
            x0 - 3.0,
            y0 + PANEL,
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use morl_core::{simplex_lattice, ObjectiveVector};

    fn identity(name: &str) -> SolutionSet {
        SolutionSet::from_pairs(
            name,
            simplex_lattice(3, 30).unwrap().into_iter().map(|w| {
                let v = ObjectiveVector::new(w.as_slice().to_vec()).unwrap();
                (w, v)
            }),
        )
        .unwrap()
    }

    #[test]
    fn identity_mapping_lies_on_the_diagonal() {
        let mut out = Vec::new();
        write_scatter_csv(&mut out, &identity("moppo")).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 3 * 28);
        for row in rows {
            let f: Vec<&str> = row.split(',').collect();
            assert_eq!(f[1], f[2]);
        }
    }

    #[test]
    fn flat_baseline_gives_zero_width_band() {
        let flat = SolutionSet::from_pairs(
            "moppo-nocond",
            simplex_lattice(3, 30).unwrap().into_iter().map(|w| (w, ObjectiveVector::new(vec![0.4, 0.3, 0.3]).unwrap())),
        )
        .unwrap();
        let svg = render_scatter_svg(&identity("moppo"), &[flat], &[]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3 * 28);
        assert_eq!(svg.matches(r#"fill-opacity="0.3""#).count(), 3);
        assert!(svg.contains(r##"height="0" fill="#999999""##));
    }
}

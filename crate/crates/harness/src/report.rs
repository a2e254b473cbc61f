use std::io::{BufRead, Write};

use morl_metrics::{
    controllability, cosine_alignment, expected_utility_stats, hypervolume, minmax_range, nadir_reference,
    normalize_set, pareto_filter, sparsity, Correlation, MetricsError, SolutionSet,
};

use crate::{is_conditioned_id, EvalConfig, HarnessError, Result, ReturnScale};

const UNDEFINED: &str = "NA";

/// Mean and population standard deviation over weight points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
}

/// One algorithm's line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    pub conditioned: bool,
    pub hv: f64,
    pub sp: f64,
    pub eu: Spread,
    /// Undefined when every return normalizes to the origin.
    pub cs: Option<Spread>,
    /// Per-objective rank correlation; all `None` for non-conditioned algorithms.
    pub rho: Vec<Option<Correlation>>,
    pub significant: Vec<bool>,
}

/// Scores every solution set against a normalization shared by all of them.
///
/// HV, SP and CS use returns min-max normalized across all sets, with the HV
/// reference at the normalized nadir minus `hv_offset`. Rank correlations
/// use raw returns. EU uses raw or normalized returns per `eu_returns`.
pub fn build_report(sets: &[SolutionSet], config: &EvalConfig) -> Result<Vec<ReportRow>> {
    let dim = sets.iter().find_map(SolutionSet::dim).ok_or(MetricsError::Empty("solution sets"))?;
    let range = minmax_range(sets)?;
    let normalized = sets.iter().map(|s| normalize_set(s, &range)).collect::<morl_metrics::Result<Vec<_>>>()?;
    let reference = nadir_reference(&normalized, config.hv_offset)?;
    sets.iter()
        .zip(&normalized)
        .map(|(raw, norm)| {
            let front = pareto_filter(&norm.returns())?;
            let eu_source = match config.eu_returns {
                ReturnScale::Raw => raw,
                ReturnScale::Normalized => norm,
            };
            let eu = expected_utility_stats(&eu_source.returns(), &raw.weights())?;
            let cs = cosine_alignment(norm)?.map(|c| Spread { mean: c.mean, std: c.std });
            let conditioned = is_conditioned_id(&raw.algorithm);
            let rho = if conditioned {
                match controllability(raw, config.correlation.method()) {
                    Ok(report) => report.per_objective,
                    Err(MetricsError::TooFewSamples(_)) => vec![None; dim],
                    Err(e) => return Err(e.into()),
                }
            } else {
                vec![None; dim]
            };
            let significant = rho.iter().map(|c| c.is_some_and(|c| c.p_value < config.significance_threshold)).collect();
            Ok(ReportRow {
                algorithm: raw.algorithm.clone(),
                conditioned,
                hv: hypervolume(front.points(), &reference)?,
                sp: sparsity(&front)?,
                eu: Spread { mean: eu.mean, std: eu.std },
                cs,
                rho,
                significant,
            })
        })
        .collect()
}

fn header(dim: usize) -> Vec<String> {
    let mut cols: Vec<String> =
        ["algorithm", "conditioned", "hv", "sp", "eu_mean", "eu_std", "cs_mean", "cs_std"].map(String::from).to_vec();
    for d in 0..dim {
        cols.extend([format!("rho_{d}"), format!("p_{d}"), format!("sig_{d}")]);
    }
    cols
}

fn report_dim(rows: &[ReportRow]) -> Result<usize> {
    let dim = rows.first().map_or(0, |r| r.rho.len());
    if rows.iter().any(|r| r.rho.len() != dim || r.significant.len() != dim) {
        return Err(HarnessError::Config("report rows disagree on the objective count".into()));
    }
    Ok(dim)
}

/// Machine-readable report; undefined entries are written as `NA`. Floats
/// are written in their shortest exact form, so reading the file back
/// reproduces the rows bit for bit.
pub fn write_report_csv<W: Write>(mut out: W, rows: &[ReportRow]) -> Result<()> {
    let dim = report_dim(rows)?;
    writeln!(out, "{}", header(dim).join(","))?;
    let opt = |v: Option<f64>| v.map_or(UNDEFINED.to_string(), |x| x.to_string());
    for r in rows {
        let mut fields = vec![
            r.algorithm.clone(),
            r.conditioned.to_string(),
            r.hv.to_string(),
            r.sp.to_string(),
            r.eu.mean.to_string(),
            r.eu.std.to_string(),
            opt(r.cs.map(|c| c.mean)),
            opt(r.cs.map(|c| c.std)),
        ];
        for (c, sig) in r.rho.iter().zip(&r.significant) {
            fields.push(opt(c.map(|c| c.coefficient)));
            fields.push(opt(c.map(|c| c.p_value)));
            fields.push(if c.is_some() { sig.to_string() } else { UNDEFINED.to_string() });
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_report_csv<R: BufRead>(input: R) -> Result<Vec<ReportRow>> {
    let mut lines = input.lines();
    let head = lines.next().transpose()?.ok_or(HarnessError::ReportCsv { line: 1, message: "missing header".into() })?;
    let cols: Vec<&str> = head.split(',').collect();
    if cols.len() < 8 || !(cols.len() - 8).is_multiple_of(3) || cols != header((cols.len() - 8) / 3) {
        return Err(HarnessError::ReportCsv { line: 1, message: format!("unexpected header {head:?}") });
    }
    let dim = (cols.len() - 8) / 3;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| HarnessError::ReportCsv { line: i + 2, message };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(err(format!("expected {} fields, found {}", cols.len(), f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
        let opt = |s: &str| if s == UNDEFINED { Ok(None) } else { num(s).map(Some) };
        let flag = |s: &str| s.parse::<bool>().map_err(|e| err(format!("{s:?}: {e}")));
        let cs = match (opt(f[6])?, opt(f[7])?) {
            (Some(mean), Some(std)) => Some(Spread { mean, std }),
            (None, None) => None,
            _ => return Err(err("cosine mean and std must both be present or both NA".into())),
        };
        let mut rho = Vec::with_capacity(dim);
        let mut significant = Vec::with_capacity(dim);
        for d in 0..dim {
            let base = 8 + 3 * d;
            match (opt(f[base])?, opt(f[base + 1])?) {
                (Some(coefficient), Some(p_value)) => {
                    rho.push(Some(Correlation { coefficient, p_value }));
                    significant.push(flag(f[base + 2])?);
                }
                (None, None) => {
                    rho.push(None);
                    significant.push(false);
                }
                _ => return Err(err(format!("objective {d}: coefficient and p-value must both be present or both NA"))),
            }
        }
        rows.push(ReportRow {
            algorithm: f[0].to_string(),
            conditioned: flag(f[1])?,
            hv: num(f[2])?,
            sp: num(f[3])?,
            eu: Spread { mean: num(f[4])?, std: num(f[5])? },
            cs,
            rho,
            significant,
        });
    }
    Ok(rows)
}

/// Human-readable table in the column order HV, SP, EU, CS, then one rank
/// correlation per objective. Significant correlations carry an asterisk.
pub fn write_report_markdown<W: Write>(mut out: W, rows: &[ReportRow], objective_names: &[String]) -> Result<()> {
    let dim = report_dim(rows)?;
    let mut table = vec![{
        let mut h: Vec<String> = ["algorithm", "HV", "SP", "EU", "CS"].map(String::from).to_vec();
        h.extend((0..dim).map(|d| format!("ρ {}", objective_names.get(d).cloned().unwrap_or_else(|| d.to_string()))));
        h
    }];
    for r in rows {
        let mut line = vec![
            r.algorithm.clone(),
            format!("{:.4}", r.hv),
            format!("{:.4}", r.sp),
            format!("{:.3} ± {:.3}", r.eu.mean, r.eu.std),
            r.cs.map_or("n/a".into(), |c| format!("{:.3} ± {:.3}", c.mean, c.std)),
        ];
        for (c, &sig) in r.rho.iter().zip(&r.significant) {
            line.push(c.map_or("n/a".into(), |c| format!("{:.3}{}", c.coefficient, if sig { "*" } else { "" })));
        }
        table.push(line);
    }
    let widths: Vec<usize> =
        (0..table[0].len()).map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let render = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| {
                let pad = " ".repeat(w - cell.chars().count());
                if c == 0 { format!("{cell}{pad}") } else { format!("{pad}{cell}") }
            })
            .collect();
        format!("| {} |", cells.join(" | "))
    };
    writeln!(out, "{}", render(&table[0]))?;
    let rule: Vec<String> = widths
        .iter()
        .enumerate()
        .map(|(c, &w)| if c == 0 { format!(":{}", "-".repeat(w.max(1) + 1)) } else { format!("{}:", "-".repeat(w + 1)) })
        .collect();
    writeln!(out, "|{}|", rule.join("|"))?;
    for row in &table[1..] {
        writeln!(out, "{}", render(row))?;
    }
    Ok(())
}

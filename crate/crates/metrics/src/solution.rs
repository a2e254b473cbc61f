use std::io::{BufRead, Write};

use morl_core::{ObjectiveVector, WeightVector};

use crate::error::check_dims;
use crate::{MetricsError, Result};

/// One evaluation batch: the conditioning weight and the return it induced.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionEntry {
    pub weight: WeightVector,
    pub ret: ObjectiveVector,
}

/// All evaluation pairs produced by one algorithm.
///
/// Non-conditioned algorithms still carry the weights they were evaluated
/// against; their returns simply do not depend on them.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub algorithm: String,
    entries: Vec<SolutionEntry>,
}

impl SolutionSet {
    pub fn new(algorithm: impl Into<String>, entries: Vec<SolutionEntry>) -> Result<Self> {
        if let Some(first) = entries.first() {
            let dim = first.ret.dim();
            for e in &entries {
                check_dims(dim, e.ret.dim())?;
                check_dims(dim, e.weight.dim())?;
            }
        }
        Ok(Self { algorithm: algorithm.into(), entries })
    }

    pub fn from_pairs(
        algorithm: impl Into<String>,
        pairs: impl IntoIterator<Item = (WeightVector, ObjectiveVector)>,
    ) -> Result<Self> {
        let entries = pairs.into_iter().map(|(weight, ret)| SolutionEntry { weight, ret }).collect();
        Self::new(algorithm, entries)
    }

    pub fn entries(&self) -> &[SolutionEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.first().map(|e| e.ret.dim())
    }

    pub fn returns(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.ret.clone()).collect()
    }

    pub fn weights(&self) -> Vec<WeightVector> {
        self.entries.iter().map(|e| e.weight.clone()).collect()
    }

    /// Same weights, returns replaced entry-wise by `f`.
    pub fn map_returns(&self, mut f: impl FnMut(&ObjectiveVector) -> Result<ObjectiveVector>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok(SolutionEntry { weight: e.weight.clone(), ret: f(&e.ret)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.algorithm.clone(), entries)
    }
}

/// Writes `algorithm,batch,w_0..w_{D-1},v_0..v_{D-1}` rows for every set.
///
/// Floats use the shortest representation that parses back to the same bits.
pub fn write_solution_csv<W: Write>(mut out: W, sets: &[SolutionSet]) -> Result<()> {
    let dim = sets
        .iter()
        .find_map(SolutionSet::dim)
        .ok_or(MetricsError::Empty("solution sets"))?;
    let mut header = vec!["algorithm".to_string(), "batch".to_string()];
    header.extend((0..dim).map(|d| format!("w_{d}")));
    header.extend((0..dim).map(|d| format!("v_{d}")));
    writeln!(out, "{}", header.join(","))?;
    for set in sets {
        if set.algorithm.contains([',', '\n', '"']) {
            return Err(MetricsError::Csv {
                line: 0,
                message: format!("algorithm id {:?} contains a separator", set.algorithm),
            });
        }
        for (batch, e) in set.entries().iter().enumerate() {
            check_dims(dim, e.ret.dim())?;
            let mut row = vec![set.algorithm.clone(), batch.to_string()];
            row.extend(e.weight.iter().map(|v| v.to_string()));
            row.extend(e.ret.iter().map(|v| v.to_string()));
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Parses solution CSV rows, grouping them by algorithm in order of first
/// appearance and ordering entries by batch index.
pub fn read_solution_csv<R: BufRead>(input: R) -> Result<Vec<SolutionSet>> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(MetricsError::Csv { line: 1, message: "missing header".into() })?;
    let header = header?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 4 || !cols.len().is_multiple_of(2) || cols[0] != "algorithm" || cols[1] != "batch" {
        return Err(MetricsError::Csv { line: 1, message: format!("unexpected header {header:?}") });
    }
    let dim = (cols.len() - 2) / 2;
    for d in 0..dim {
        if cols[2 + d] != format!("w_{d}") || cols[2 + dim + d] != format!("v_{d}") {
            return Err(MetricsError::Csv { line: 1, message: format!("unexpected header {header:?}") });
        }
    }

    let mut groups: Vec<(String, Vec<(usize, SolutionEntry)>)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let csv_err = |message: String| MetricsError::Csv { line: line_no, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(csv_err(format!("expected {} fields, found {}", cols.len(), fields.len())));
        }
        let batch: usize = fields[1].parse().map_err(|e| csv_err(format!("batch: {e}")))?;
        let nums = fields[2..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| csv_err(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        let weight = WeightVector::new(nums[..dim].to_vec()).map_err(|e| csv_err(e.to_string()))?;
        let ret = ObjectiveVector::new(nums[dim..].to_vec()).map_err(|e| csv_err(e.to_string()))?;
        let entry = SolutionEntry { weight, ret };
        match groups.iter_mut().find(|(name, _)| name == fields[0]) {
            Some((_, entries)) => entries.push((batch, entry)),
            None => groups.push((fields[0].to_string(), vec![(batch, entry)])),
        }
    }
    groups
        .into_iter()
        .map(|(name, mut entries)| {
            entries.sort_by_key(|(b, _)| *b);
            SolutionSet::new(name, entries.into_iter().map(|(_, e)| e).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(name: &str, rows: &[([f64; 2], [f64; 2])]) -> SolutionSet {
        SolutionSet::from_pairs(
            name,
            rows.iter().map(|(w, v)| {
                (WeightVector::new(w.to_vec()).unwrap(), ObjectiveVector::new(v.to_vec()).unwrap())
            }),
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let sets = vec![
            set("moppo", &[([1.0, 0.0], [0.1, 1e-17]), ([0.3, 0.7], [1.0 / 3.0, -2.5])]),
            set("ppo", &[([0.5, 0.5], [std::f64::consts::PI, 0.0])]),
        ];
        let mut buf = Vec::new();
        write_solution_csv(&mut buf, &sets).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("algorithm,batch,w_0,w_1,v_0,v_1\n"));
        let back = read_solution_csv(buf.as_slice()).unwrap();
        assert_eq!(back, sets);
        let mut again = Vec::new();
        write_solution_csv(&mut again, &back).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn rejects_malformed_rows() {
        let bad = "algorithm,batch,w_0,w_1,v_0,v_1\nx,0,0.5,0.5,1\n";
        assert!(matches!(read_solution_csv(bad.as_bytes()), Err(MetricsError::Csv { line: 2, .. })));
        let bad_weight = "algorithm,batch,w_0,w_1,v_0,v_1\nx,0,0.5,0.6,1,1\n";
        assert!(read_solution_csv(bad_weight.as_bytes()).is_err());
        let bad_header = "algo,batch,w_0,v_0\n";
        assert!(read_solution_csv(bad_header.as_bytes()).is_err());
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let e1 = SolutionEntry { weight: WeightVector::uniform(2), ret: ObjectiveVector::zeros(2) };
        let e2 = SolutionEntry { weight: WeightVector::uniform(3), ret: ObjectiveVector::zeros(3) };
        assert!(SolutionSet::new("a", vec![e1, e2]).is_err());
    }
}

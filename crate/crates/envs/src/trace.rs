use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::StepResult;

/// Per-step CSV dump: `step,agent,action,reward_0..reward_{D-1},terminated,truncated`.
pub struct TraceWriter<W: Write> {
    out: W,
    objective_count: usize,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, objective_count: usize) -> io::Result<Self> {
        Self::new(BufWriter::new(File::create(path)?), objective_count)
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, objective_count: usize) -> io::Result<Self> {
        write!(out, "step,agent,action")?;
        for d in 0..objective_count {
            write!(out, ",reward_{d}")?;
        }
        writeln!(out, ",terminated,truncated")?;
        Ok(Self { out, objective_count })
    }

    pub fn record(&mut self, step: usize, agent: usize, action: usize, result: &StepResult) -> io::Result<()> {
        if result.reward.dim() != self.objective_count {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("reward has {} components, trace expects {}", result.reward.dim(), self.objective_count),
            ));
        }
        write!(self.out, "{step},{agent},{action}")?;
        for r in result.reward.iter() {
            write!(self.out, ",{r}")?;
        }
        writeln!(self.out, ",{},{}", result.terminated, result.truncated)
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

#[cfg(test)]
mod tests {
    use morl_core::ObjectiveVector;

    use super::*;

    #[test]
    fn writes_rows() {
        let mut t = TraceWriter::new(Vec::new(), 3).unwrap();
        let r = StepResult {
            observation: vec![],
            reward: ObjectiveVector::new(vec![0.1, 0.0, -1.0]).unwrap(),
            terminated: true,
            truncated: false,
        };
        t.record(7, 2, 1, &r).unwrap();
        let text = String::from_utf8(t.into_inner().unwrap()).unwrap();
        assert_eq!(
            text,
            "step,agent,action,reward_0,reward_1,reward_2,terminated,truncated\n7,2,1,0.1,0,-1,true,false\n"
        );
    }
}

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use morl_metrics::SolutionSet;
use morl_nn::PolicyCheckpoint;
use morl_ppo::{train, write_metrics_csv};

use crate::{
    build_report, check_compatible, dynamic_demo, evaluate, is_conditioned_id, load_config, read_records,
    render_scatter_svg, write_demo_csv, write_records, write_report_csv, write_report_markdown, write_scatter_csv,
    CheckpointActor, HarnessError, ReportRow, Result, RunConfig, Stage,
};

/// Files written by a pipeline run, in the order they were produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub artifacts: Vec<PathBuf>,
    /// Rows of the last report stage, if one ran.
    pub report: Vec<ReportRow>,
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::File { path: dir.display().to_string(), source })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| HarnessError::File { path: path.display().to_string(), source })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| HarnessError::File { path: path.display().to_string(), source })
}

/// Turns an algorithm id into a file-name fragment.
fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

struct Pipeline<'a> {
    config: &'a RunConfig,
    summary: RunSummary,
    checkpoints: Option<Vec<(String, PolicyCheckpoint)>>,
    records: Option<Vec<SolutionSet>>,
}

impl Pipeline<'_> {
    fn out(&self, name: &str) -> PathBuf {
        self.config.run.out.join(name)
    }

    fn record(&mut self, path: PathBuf) {
        self.summary.artifacts.push(path);
    }

    fn train(&mut self) -> Result<()> {
        let mut trained = Vec::new();
        for &variant in &self.config.run.variants {
            let output = train(variant, &self.config.env, &self.config.train, |_| {})?;
            let dir = self.out(variant.name());
            let ckpt = dir.join("checkpoint.bin");
            output.checkpoint.write_to(create(&ckpt)?)?;
            let metrics = dir.join("metrics.csv");
            write_metrics_csv(create(&metrics)?, &output.log)?;
            self.record(ckpt);
            self.record(metrics);
            trained.push((variant.name().to_string(), output.checkpoint));
        }
        self.checkpoints = Some(trained);
        Ok(())
    }

    /// Checkpoints from this run, else the configured paths, else the
    /// checkpoints a previous run trained into the output directory.
    fn checkpoints(&mut self) -> Result<Vec<(String, PolicyCheckpoint)>> {
        if let Some(c) = &self.checkpoints {
            return Ok(c.clone());
        }
        let paths: Vec<PathBuf> = if self.config.run.checkpoints.is_empty() {
            self.config.run.variants.iter().map(|v| self.out(v.name()).join("checkpoint.bin")).collect()
        } else {
            self.config.run.checkpoints.clone()
        };
        let mut loaded: Vec<(String, PolicyCheckpoint)> = Vec::new();
        for path in paths {
            let ckpt = PolicyCheckpoint::read_from(open(&path)?)?;
            let base = ckpt.metadata.variant.clone();
            let taken = loaded.iter().filter(|(id, _)| id.split(':').next() == Some(base.as_str())).count();
            let id = if taken == 0 { base } else { format!("{base}:{taken}") };
            loaded.push((id, ckpt));
        }
        self.checkpoints = Some(loaded.clone());
        Ok(loaded)
    }

    fn evaluate(&mut self) -> Result<()> {
        let mut records = Vec::new();
        for (id, ckpt) in self.checkpoints()? {
            let mut record = evaluate(&ckpt, &self.config.env, &self.config.eval)?;
            record.algorithm = id;
            records.push(record);
        }
        let path = self.out("records.csv");
        write_records(create(&path)?, &records)?;
        self.record(path);
        self.records = Some(records.iter().map(|r| r.solution_set()).collect::<Result<_>>()?);
        Ok(())
    }

    fn records(&mut self) -> Result<Vec<SolutionSet>> {
        if self.records.is_none() {
            self.records = Some(read_records(open(&self.out("records.csv"))?)?);
        }
        Ok(self.records.clone().unwrap_or_default())
    }

    fn report(&mut self) -> Result<()> {
        let sets = self.records()?;
        let rows = build_report(&sets, &self.config.eval)?;
        let names = self.config.env.spec()?.objective_names;
        let (csv, md) = (self.out("report.csv"), self.out("report.md"));
        write_report_csv(create(&csv)?, &rows)?;
        write_report_markdown(create(&md)?, &rows, &names)?;
        self.record(csv);
        self.record(md);
        self.summary.report = rows;
        Ok(())
    }

    fn scatter(&mut self) -> Result<()> {
        let sets = self.records()?;
        let names = self.config.env.spec()?.objective_names;
        let baselines: Vec<SolutionSet> = sets.iter().filter(|s| !is_conditioned_id(&s.algorithm)).cloned().collect();
        for set in &sets {
            let stem = file_stem(&set.algorithm);
            let csv = self.out(&format!("scatter_{stem}.csv"));
            write_scatter_csv(create(&csv)?, set)?;
            let svg = self.out(&format!("scatter_{stem}.svg"));
            let own: Vec<SolutionSet> = baselines.iter().filter(|b| b.algorithm != set.algorithm).cloned().collect();
            std::fs::write(&svg, render_scatter_svg(set, &own, &names)?)
                .map_err(|source| HarnessError::File { path: svg.display().to_string(), source })?;
            self.record(csv);
            self.record(svg);
        }
        Ok(())
    }

    fn demo(&mut self) -> Result<()> {
        let demo = &self.config.demo;
        let conditioned: Vec<_> = self.checkpoints()?.into_iter().filter(|(id, _)| is_conditioned_id(id)).collect();
        if conditioned.is_empty() {
            return Err(HarnessError::Config("demo stage needs a weight-conditioned checkpoint".into()));
        }
        for (id, ckpt) in conditioned {
            let spec = check_compatible(&ckpt, &self.config.env)?;
            let (initial, schedule) = demo.resolve(spec.objective_count)?;
            let actor = CheckpointActor::new(&ckpt, demo.deterministic);
            let log = dynamic_demo(&actor, &demo.demo_env(&self.config.env), &initial, &schedule, demo.horizon, demo.seed)?;
            let path = self.out(&format!("demo_{}.csv", file_stem(&id)));
            write_demo_csv(create(&path)?, &log)?;
            self.record(path);
        }
        Ok(())
    }
}

/// Executes the configured stages in order, writing everything under
/// `run.out` together with the resolved configuration.
pub fn execute(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let echo = config.run.out.join("resolved_config.toml");
    std::io::Write::write_all(&mut create(&echo)?, config.to_toml()?.as_bytes())?;
    let mut pipeline = Pipeline { config, summary: RunSummary::default(), checkpoints: None, records: None };
    pipeline.record(echo);
    for stage in &config.run.stages {
        match stage {
            Stage::Train => pipeline.train()?,
            Stage::Evaluate => pipeline.evaluate()?,
            Stage::Report => pipeline.report()?,
            Stage::Scatter => pipeline.scatter()?,
            Stage::Demo => pipeline.demo()?,
        }
    }
    Ok(pipeline.summary)
}

pub fn run_config(path: &Path) -> Result<RunSummary> {
    execute(&load_config(path)?)
}

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use cholqr::cost::{CostEstimate, CostModel};
use cholqr::harness::{run_factorization, RunConfig, RunOutcome};
use cholqr::io::{read_matrix_file, write_matrix_file, TsmError};
use cholqr::testbed::{GeneratedMatrix, Generator, StabilityReport, TestbedError};
use cholqr::{Algorithm, Matrix, PanelSpec, QrError};

use crate::args::{CostArgs, FactorArgs, GenArgs, RunArgs, SweepCondArgs, SweepPanelsArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("cholesky breakdown")]
    Breakdown,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Breakdown => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<TsmError> for CliError {
    fn from(e: TsmError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<TestbedError> for CliError {
    fn from(e: TestbedError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn gen(a: &GenArgs) -> Result<()> {
    let g = Generator::new(a.m, a.n, a.seed)?.build(a.kappa)?;
    write_matrix_file(&a.out, &g.matrix)?;
    let sigma = &g.singular_values;
    let meta = format!(
        "m={}\nn={}\nseed={}\nkappa={}\nsigma_max={}\nsigma_min={}\n",
        a.m,
        a.n,
        g.seed,
        num(g.target_condition),
        num(sigma[0]),
        num(sigma[sigma.len() - 1]),
    );
    fs::write(meta_path(&a.out), meta)?;
    Ok(())
}

/// Condition number recorded next to a matrix file by `gen`, if any.
fn sidecar_kappa(path: &Path) -> Option<f64> {
    let text = fs::read_to_string(meta_path(path)).ok()?;
    text.lines()
        .find_map(|l| l.strip_prefix("kappa="))
        .and_then(|v| v.trim().parse().ok())
}

fn config(algo: Algorithm, panels: Option<usize>, run: &RunArgs) -> Result<RunConfig> {
    if panels.is_some() && !algo.uses_panels() {
        return Err(CliError::Usage(format!("--panels is only accepted by cqrgs, cqr2gs and mcqr2gs, not {algo}")));
    }
    let mut cfg = RunConfig::new(algo, run.ranks).backend(run.backend);
    if let Some(k) = panels {
        cfg = cfg.panels(k);
    }
    Ok(cfg)
}

/// Checks the combination up front so that bad panel or rank counts are usage
/// errors rather than failed runs.
fn validate(a: &Matrix, cfg: &RunConfig) -> Result<()> {
    let (m, n) = a.shape();
    if n == 0 || m < n {
        return Err(CliError::Usage(format!("need m >= n >= 1, got {m}x{n}")));
    }
    if cfg.ranks > m {
        return Err(CliError::Usage(format!("{} ranks exceed {m} rows", cfg.ranks)));
    }
    if let Some(k) = cfg.options.panels {
        PanelSpec::from_panels(n, k).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

/// Effective panel count, empty for the unpanelled algorithms.
fn panel_column(algo: Algorithm, n: usize, panels: Option<usize>) -> String {
    if !algo.uses_panels() {
        return String::new();
    }
    PanelSpec::from_panels(n, panels.unwrap_or(1))
        .map(|s| s.count().to_string())
        .unwrap_or_default()
}

fn run_one(a: &Matrix, cfg: &RunConfig) -> Result<(RunOutcome, StabilityReport)> {
    let outcome = run_factorization(a, cfg);
    if let Err(e) = &outcome.factors {
        if e.breakdown().is_none() {
            return Err(match e {
                QrError::Panel(_) | QrError::InvalidShape { .. } | QrError::PanelsNotApplicable { .. } => {
                    CliError::Usage(e.to_string())
                }
                other => CliError::Io(other.to_string()),
            });
        }
    }
    let report = StabilityReport::evaluate(a, &outcome)?;
    Ok((outcome, report))
}

fn generated(m: usize, n: usize, kappa: f64, seed: u64) -> Result<GeneratedMatrix> {
    Ok(Generator::new(m, n, seed)?.build(kappa)?)
}

pub const FACTOR_HEADER: &str =
    "algo,m,n,kappa,P,k,orthogonality,residual,breakdown,allreduce_calls,elapsed_seconds";

pub fn factor(a: &FactorArgs) -> Result<()> {
    let cfg = config(a.algo, a.panels, &a.run)?;
    let (matrix, kappa) = match &a.input {
        Some(path) => (read_matrix_file(path)?, sidecar_kappa(path)),
        None => {
            let (m, n, kappa) = (a.m.expect("required"), a.n.expect("required"), a.kappa.expect("required"));
            (generated(m, n, kappa, a.run.seed)?.matrix, Some(kappa))
        }
    };
    validate(&matrix, &cfg)?;
    let (outcome, report) = run_one(&matrix, &cfg)?;

    if let (Some(dir), Ok(f)) = (&a.out_dir, &outcome.factors) {
        fs::create_dir_all(dir)?;
        write_matrix_file(dir.join("q.tsm"), &f.q)?;
        write_matrix_file(dir.join("r.tsm"), f.r.as_matrix())?;
    }

    let (m, n) = matrix.shape();
    let mut out = io::stdout().lock();
    if a.header {
        writeln!(out, "{FACTOR_HEADER}")?;
    }
    writeln!(
        out,
        "{},{m},{n},{},{},{},{},{},{},{},{}",
        a.algo,
        kappa.map(num).unwrap_or_default(),
        cfg.ranks,
        panel_column(a.algo, n, a.panels),
        num(report.orthogonality),
        num(report.residual),
        u8::from(report.breakdown.is_some()),
        report.allreduce_calls,
        num(report.elapsed.as_secs_f64()),
    )?;
    if report.breakdown.is_some() {
        return Err(CliError::Breakdown);
    }
    Ok(())
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn sweep_cond(a: &SweepCondArgs) -> Result<()> {
    let configs: Vec<RunConfig> = a
        .algos
        .iter()
        .map(|&algo| config(algo, a.panels.filter(|_| algo.uses_panels()), &a.run))
        .collect::<Result<_>>()?;
    let mut out = sink(&a.out)?;
    writeln!(out, "algo,kappa,panels,orthogonality,residual,breakdown")?;
    if a.kappas.is_empty() {
        out.flush()?;
        return Ok(());
    }
    let gen = Generator::new(a.m, a.n, a.run.seed)?;
    for &kappa in &a.kappas {
        let matrix = gen.build(kappa)?.matrix;
        for cfg in &configs {
            validate(&matrix, cfg)?;
            let (_, report) = run_one(&matrix, cfg)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                cfg.algorithm,
                num(kappa),
                panel_column(cfg.algorithm, a.n, cfg.options.panels),
                num(report.orthogonality),
                num(report.residual),
                u8::from(report.breakdown.is_some()),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn sweep_panels(a: &SweepPanelsArgs) -> Result<()> {
    if !a.algo.uses_panels() {
        return Err(CliError::Usage(format!("{} does not take a panel count", a.algo)));
    }
    let configs: Vec<RunConfig> = a
        .panels
        .iter()
        .map(|&k| config(a.algo, Some(k), &a.run))
        .collect::<Result<_>>()?;
    let matrix = generated(a.m, a.n, a.kappa, a.run.seed)?.matrix;
    for cfg in &configs {
        validate(&matrix, cfg)?;
    }
    let mut out = sink(&a.out)?;
    writeln!(out, "panels,b,orthogonality,residual,allreduce_calls,elapsed_seconds")?;
    for cfg in &configs {
        let spec = PanelSpec::from_panels(a.n, cfg.options.panels.unwrap_or(1))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let (_, report) = run_one(&matrix, cfg)?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            spec.count(),
            spec.width(),
            num(report.orthogonality),
            num(report.residual),
            report.allreduce_calls,
            num(report.elapsed.as_secs_f64()),
        )?;
    }
    out.flush()?;
    Ok(())
}

fn cost_row(c: &CostEstimate, model: CostModel) -> String {
    format!(
        "{model},{},{},{},{},{},{},{}",
        c.m,
        c.n,
        c.p,
        c.b.map(|b| b.to_string()).unwrap_or_default(),
        num(c.flops),
        num(c.words),
        num(c.messages),
    )
}

pub fn cost(a: &CostArgs) -> Result<()> {
    if a.m < a.n {
        return Err(CliError::Usage(format!("need m >= n, got {}x{}", a.m, a.n)));
    }
    if a.b.is_some_and(|b| b > a.n) {
        return Err(CliError::Usage(format!("panel width must not exceed n = {}", a.n)));
    }
    let models = match a.model {
        Some(m) => vec![m],
        None => CostModel::ALL.to_vec(),
    };
    let mut out = io::stdout().lock();
    writeln!(out, "model,m,n,P,b,flops,words,messages")?;
    for model in models {
        writeln!(out, "{}", cost_row(&model.evaluate(a.m, a.n, a.p, a.b), model))?;
    }
    Ok(())
}

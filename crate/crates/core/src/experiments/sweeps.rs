use rayon::prelude::*;

use super::config::{Evaluation, ExperimentConfig, ResolvedTopology};
use super::engine::{PairPropagation, ProductState};
use crate::error::{Error, Result};
use crate::quadratic::{self, HamiltonianMatrices};

/// Strict-peak margin for [`first_local_max`].
pub const PEAK_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub ct: f64,
    pub pair: (usize, usize),
    pub pair_labels: (String, String),
    pub negativity: f64,
    pub nu_min: f64,
}

/// Consecutive rows sharing an optional `# comment` line in the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub comment: Option<String>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub sections: Vec<Section>,
    pub config_echo: String,
    pub version: &'static str,
}

impl SweepResult {
    fn single(rows: Vec<SweepRow>, config: &ExperimentConfig) -> Self {
        Self {
            sections: vec![Section { comment: None, rows }],
            config_echo: config.echo(),
            version: super::VERSION,
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.sections.iter().flat_map(|s| s.rows.iter())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        super::csv::write_csv(self, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMax {
    pub index: usize,
    pub ct: f64,
    pub value: f64,
    /// False when no strict interior peak exists and this is the global
    /// maximum instead.
    pub strict: bool,
}

/// Earliest interior sample exceeding both neighbours by more than
/// [`PEAK_MARGIN`], among samples with `ct < bound`. Plateaus never count as
/// peaks. Without any strict peak the first global maximum is returned with
/// `strict = false`.
pub fn first_local_max(series: &[(f64, f64)], bound: f64) -> Result<LocalMax> {
    let domain: Vec<(f64, f64)> = series.iter().copied().filter(|&(ct, _)| ct < bound).collect();
    if domain.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples below ct = {bound}, got {}",
            domain.len()
        )));
    }
    let peak = (1..domain.len() - 1).find(|&k| {
        let v = domain[k].1;
        v > domain[k - 1].1 + PEAK_MARGIN && v > domain[k + 1].1 + PEAK_MARGIN
    });
    let (index, strict) = match peak {
        Some(k) => (k, true),
        None => {
            let mut best = 0;
            for (k, &(_, v)) in domain.iter().enumerate() {
                if v > domain[best].1 {
                    best = k;
                }
            }
            (best, false)
        }
    };
    Ok(LocalMax {
        index,
        ct: domain[index].0,
        value: domain[index].1,
        strict,
    })
}

struct Setup {
    topo: ResolvedTopology,
    h: HamiltonianMatrices,
    pairs: Vec<(usize, usize)>,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.grid.validate()?;
        if config.pairs.is_empty() {
            return Err(Error::Config("no pairs to evaluate".into()));
        }
        if config.deltas.is_empty() || config.squeezing.is_empty() {
            return Err(Error::Config("empty sweep grid".into()));
        }
        let topo = config.topology.resolve()?;
        let pairs = config.pairs.iter().map(|p| topo.pair(p)).collect::<Result<Vec<_>>>()?;
        let h = quadratic::assemble(&topo.net);
        Ok(Self { topo, h, pairs })
    }

    fn product(&self, config: &ExperimentConfig, r: f64, delta: f64) -> Result<ProductState> {
        ProductState::new(&self.topo.preparations(r, delta, &config.overrides)?)
    }

    /// Modes that any preparation of this config can excite.
    fn active_modes(&self, config: &ExperimentConfig) -> Result<Vec<usize>> {
        let mut active: Vec<usize> = self.topo.net.references().to_vec();
        for o in &config.overrides {
            active.push(self.topo.node(&o.node)?);
        }
        active.sort_unstable();
        active.dedup();
        Ok(active)
    }

    fn propagation(&self, config: &ExperimentConfig, times: &[f64]) -> Result<PairPropagation> {
        PairPropagation::new(&self.h, self.topo.c, times, &self.pairs, &self.active_modes(config)?)
    }

    fn labels(&self, (a, b): (usize, usize)) -> (String, String) {
        (self.topo.net.label(a).to_string(), self.topo.net.label(b).to_string())
    }

    fn row(&self, sweep_value: f64, ct: f64, pair: (usize, usize), negativity: f64, nu_min: f64) -> SweepRow {
        SweepRow {
            sweep_value,
            ct,
            pair,
            pair_labels: self.labels(pair),
            negativity,
            nu_min,
        }
    }

    fn times(&self, config: &ExperimentConfig) -> Vec<f64> {
        match config.evaluation {
            Evaluation::At(ct) => vec![ct],
            Evaluation::FirstLocalMax => config.grid.points(),
        }
    }

    /// One row per pair for a fixed preparation, at the configured evaluation.
    fn evaluate(
        &self,
        config: &ExperimentConfig,
        prop: &PairPropagation,
        product: &ProductState,
        sweep_value: f64,
    ) -> Result<Vec<SweepRow>> {
        let mut rows = Vec::with_capacity(self.pairs.len());
        for (pi, &pair) in self.pairs.iter().enumerate() {
            let ti = match config.evaluation {
                Evaluation::At(_) => 0,
                Evaluation::FirstLocalMax => {
                    let series = (0..prop.times().len())
                        .map(|ti| Ok((prop.times()[ti], prop.report(ti, pi, product)?.negativity)))
                        .collect::<Result<Vec<_>>>()?;
                    first_local_max(&series, config.grid.ct_max)?.index
                }
            };
            let report = prop.report(ti, pi, product)?;
            rows.push(self.row(sweep_value, prop.times()[ti], pair, report.negativity, report.min_nu()));
        }
        Ok(rows)
    }
}

fn single_r(config: &ExperimentConfig) -> Result<f64> {
    match config.squeezing[..] {
        [r] => Ok(r),
        _ => Err(Error::Config("this experiment takes a single squeezing value".into())),
    }
}

/// `N(pair, ct)` over the time grid for every configured `δ`. Rows are
/// `δ`-major, then time, then pair; `sweep_value` is `δ`.
pub fn run_time_series(config: &ExperimentConfig) -> Result<SweepResult> {
    let setup = Setup::new(config)?;
    let r = single_r(config)?;
    let prop = setup.propagation(config, &config.grid.points())?;

    let blocks = config
        .deltas
        .par_iter()
        .map(|&delta| {
            let product = setup.product(config, r, delta)?;
            let mut rows = Vec::with_capacity(prop.times().len() * setup.pairs.len());
            for (ti, &ct) in prop.times().iter().enumerate() {
                for (pi, &pair) in setup.pairs.iter().enumerate() {
                    let report = prop.report(ti, pi, &product)?;
                    rows.push(setup.row(delta, ct, pair, report.negativity, report.min_nu()));
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::single(blocks.concat(), config))
}

/// `N(δ)` at a fixed `ct`, or at the first local maximum over the time grid.
pub fn sweep_delta(config: &ExperimentConfig) -> Result<SweepResult> {
    let setup = Setup::new(config)?;
    let r = single_r(config)?;
    let prop = setup.propagation(config, &setup.times(config))?;

    let blocks = config
        .deltas
        .par_iter()
        .map(|&delta| setup.evaluate(config, &prop, &setup.product(config, r, delta)?, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::single(blocks.concat(), config))
}

/// `N(r)` at fixed `ct` for each configured `δ`; one CSV section per `δ`.
pub fn sweep_r(config: &ExperimentConfig) -> Result<SweepResult> {
    let setup = Setup::new(config)?;
    let prop = setup.propagation(config, &setup.times(config))?;

    let jobs: Vec<(f64, f64)> = config
        .deltas
        .iter()
        .flat_map(|&d| config.squeezing.iter().map(move |&r| (d, r)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(delta, r)| setup.evaluate(config, &prop, &setup.product(config, r, delta)?, r))
        .collect::<Result<Vec<_>>>()?;

    let per_delta = config.squeezing.len();
    let sections = config
        .deltas
        .iter()
        .zip(rows.chunks(per_delta))
        .map(|(&delta, chunk)| Section {
            comment: Some(format!("delta={}", super::csv::format_g12(delta))),
            rows: chunk.concat(),
        })
        .collect();
    Ok(SweepResult {
        sections,
        config_echo: config.echo(),
        version: super::VERSION,
    })
}

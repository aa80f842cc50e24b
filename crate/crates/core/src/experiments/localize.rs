//! End-to-end check of entanglement localization on the interferometric
//! setup, against the exact ring verdict.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::config::TimeGrid;
use super::csv::format_g12;
use super::engine::{PairPropagation, ProductState};
use super::sweeps::{Section, SweepResult, SweepRow};
use crate::analytic;
use crate::error::{Error, Result};
use crate::gaussian::ModePreparation;
use crate::network::{self, OscillatorNetwork};
use crate::quadratic;

/// Negativity below this is "no entanglement".
pub const ZERO_FLOOR: f64 = 1e-9;
/// Classical preparations must stay below this everywhere.
pub const CLASSICAL_FLOOR: f64 = 1e-12;
/// Hub–reference negativity that must be reached inside the ring.
pub const HUB_REFERENCE_FLOOR: f64 = 1e-3;

const BASELINE_CHAIN_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationSpec {
    pub ms: Vec<usize>,
    pub rs: Vec<f64>,
    pub cs: Vec<f64>,
    pub delta_step: f64,
    pub grid: TimeGrid,
    pub baselines: bool,
}

impl Default for LocalizationSpec {
    fn default() -> Self {
        Self {
            ms: vec![2, 4, 10, 38],
            rs: vec![1.0],
            cs: vec![0.1, 0.3, 1.0],
            delta_step: 0.01,
            grid: TimeGrid::default(),
            baselines: true,
        }
    }
}

impl LocalizationSpec {
    fn validate(&self) -> Result<()> {
        if self.ms.is_empty() || self.rs.is_empty() || self.cs.is_empty() {
            return Err(Error::Config("M, r and c lists must be nonempty".into()));
        }
        if let Some(m) = self.ms.iter().find(|&&m| m < 2 || !m.is_multiple_of(2)) {
            return Err(Error::Config(format!("M must be even and >= 2, got {m}")));
        }
        if let Some(r) = self.rs.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("localization needs r > 0, got {r}")));
        }
        if let Some(c) = self.cs.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Config(format!("coupling must be positive, got {c}")));
        }
        if !(self.delta_step > 0.0 && self.delta_step < TAU) {
            return Err(Error::Config(format!("invalid delta step {}", self.delta_step)));
        }
        self.grid.validate()
    }

    pub fn deltas(&self) -> Vec<f64> {
        (0..)
            .map(|k| k as f64 * self.delta_step)
            .take_while(|&d| d < TAU)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Chain ends stay separable where the verdict is non-entangling.
    EndPairZero,
    /// Hubs stay separable where the verdict is non-entangling.
    HubPairZero,
    /// Each hub gets entangled with each reference.
    HubReferenceEntangled,
    /// Numerical entangling/non-entangling split equals the verdict.
    Classification,
    /// Edges of the zero window sit within one grid step of `δ*`, `2π − δ*`.
    Boundary,
    /// Classification does not depend on the coupling constant.
    CouplingIndependence,
    /// Classical preparations never entangle anything.
    ClassicalBaseline,
}

/// Largest negativity over the time grid, where it happened, and the
/// smallest transposed symplectic eigenvalue seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub negativity: f64,
    pub ct: f64,
    pub nu_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaOutcome {
    pub delta: f64,
    pub verdict: bool,
    pub end: Peak,
    pub hub: Peak,
    /// Smallest (over the four hub–reference pairs) peak negativity, scanned
    /// until [`HUB_REFERENCE_FLOOR`] is exceeded. Only for non-entangling `δ`.
    pub hub_reference: Option<f64>,
}

impl DeltaOutcome {
    pub fn entangling(&self) -> bool {
        self.end.negativity >= ZERO_FLOOR
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub m: usize,
    pub r: f64,
    pub c: f64,
    pub end_labels: (String, String),
    pub hub_labels: (String, String),
    pub deltas: Vec<DeltaOutcome>,
    /// First contiguous run of separable chain ends in the `δ` grid.
    pub zero_window: Option<(f64, f64)>,
    pub expected_window: (f64, f64),
}

impl CaseOutcome {
    pub fn classification(&self) -> Vec<bool> {
        self.deltas.iter().map(DeltaOutcome::entangling).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub topology: String,
    pub preparation: String,
    pub c: f64,
    pub pairs: usize,
    pub max_negativity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub check: Check,
    pub m: Option<usize>,
    pub r: Option<f64>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub ct: Option<f64>,
    pub pair: Option<(String, String)>,
    pub detail: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.check)?;
        let opt = |name: &str, v: Option<f64>| v.map(|v| format!(" {name}={}", format_g12(v))).unwrap_or_default();
        if let Some(m) = self.m {
            write!(f, " M={m}")?;
        }
        write!(
            f,
            "{}{}{}{}",
            opt("r", self.r),
            opt("c", self.c),
            opt("delta", self.delta),
            opt("ct", self.ct)
        )?;
        if let Some((a, b)) = &self.pair {
            write!(f, " pair=({a},{b})")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub spec: LocalizationSpec,
    pub cases: Vec<CaseOutcome>,
    pub baselines: Vec<BaselineOutcome>,
    pub failures: Vec<Failure>,
}

impl LocalizationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, check: Check) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.check == check)
    }

    /// Human-readable summary, one line per case and baseline, then failures.
    pub fn summary(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for case in &self.cases {
            let ok = !self
                .failures
                .iter()
                .any(|f| f.m == Some(case.m) && f.r == Some(case.r) && f.c == Some(case.c));
            let window = case
                .zero_window
                .map(|(lo, hi)| format!("[{}, {}]", format_g12(lo), format_g12(hi)))
                .unwrap_or_else(|| "none".into());
            lines.push(format!(
                "{} M={} r={} c={}: zero window {} expected [{}, {}]",
                if ok { "PASS" } else { "FAIL" },
                case.m,
                format_g12(case.r),
                format_g12(case.c),
                window,
                format_g12(case.expected_window.0),
                format_g12(case.expected_window.1),
            ));
        }
        for b in &self.baselines {
            lines.push(format!(
                "{} baseline {} {} c={}: max N = {} over {} pairs",
                if b.max_negativity < CLASSICAL_FLOOR {
                    "PASS"
                } else {
                    "FAIL"
                },
                b.topology,
                b.preparation,
                format_g12(b.c),
                format_g12(b.max_negativity),
                b.pairs,
            ));
        }
        lines.extend(self.failures.iter().map(|f| format!("failure: {f}")));
        lines.push(format!(
            "{}: {} failure(s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures.len()
        ));
        lines
    }

    /// Peak rows per `δ` for the end pair and the hub pair, one section per
    /// `(M, r, c)`.
    pub fn to_sweep_result(&self) -> SweepResult {
        let sections = self
            .cases
            .iter()
            .map(|case| {
                let mut rows = Vec::with_capacity(2 * case.deltas.len());
                for d in &case.deltas {
                    for (peak, labels) in [(&d.end, &case.end_labels), (&d.hub, &case.hub_labels)] {
                        rows.push(SweepRow {
                            sweep_value: d.delta,
                            ct: peak.ct,
                            pair: (0, 0),
                            pair_labels: labels.clone(),
                            negativity: peak.negativity,
                            nu_min: peak.nu_min,
                        });
                    }
                }
                Section {
                    comment: Some(format!(
                        "M={} r={} c={}",
                        case.m,
                        format_g12(case.r),
                        format_g12(case.c)
                    )),
                    rows,
                }
            })
            .collect();
        SweepResult {
            sections,
            config_echo: format!("{:?}", self.spec),
            version: super::VERSION,
        }
    }
}

/// Runs every `(M, r, c)` case over the `δ` grid and the classical baselines.
pub fn localization_suite(spec: &LocalizationSpec) -> Result<LocalizationReport> {
    spec.validate()?;
    let times = spec.grid.points();
    let deltas = spec.deltas();

    let mut cases = Vec::new();
    for &m in &spec.ms {
        for &r in &spec.rs {
            for &c in &spec.cs {
                cases.push(run_case(m, r, c, &deltas, &times)?);
            }
        }
    }

    let mut failures = Vec::new();
    for case in &cases {
        check_case(case, spec.delta_step, &mut failures);
    }
    check_coupling_independence(&cases, &mut failures);

    let mut baselines = Vec::new();
    if spec.baselines {
        for &c in &spec.cs {
            let chain = network::build_chain(BASELINE_CHAIN_LEN, c)?;
            let ends = vec![0, BASELINE_CHAIN_LEN - 1];
            baselines.extend(run_baselines(
                &chain,
                &ends,
                format!("chain:n={BASELINE_CHAIN_LEN}"),
                c,
                &times,
            )?);
            for &m in &spec.ms {
                let net = network::build_interferometric(m, c)?;
                let refs = net.references().to_vec();
                baselines.extend(run_baselines(&net, &refs, format!("interferometric:M={m}"), c, &times)?);
            }
        }
        for b in &baselines {
            if b.max_negativity >= CLASSICAL_FLOOR {
                failures.push(Failure {
                    check: Check::ClassicalBaseline,
                    m: None,
                    r: None,
                    c: Some(b.c),
                    delta: None,
                    ct: None,
                    pair: None,
                    detail: format!("{} with {}: N = {:e}", b.topology, b.preparation, b.max_negativity),
                });
            }
        }
    }

    Ok(LocalizationReport {
        spec: spec.clone(),
        cases,
        baselines,
        failures,
    })
}

fn scan(prop: &PairPropagation, pi: usize, product: &ProductState) -> Result<Peak> {
    let mut peak = Peak {
        negativity: 0.0,
        ct: prop.times()[0],
        nu_min: f64::INFINITY,
    };
    for ti in 0..prop.times().len() {
        let report = prop.report(ti, pi, product)?;
        if report.negativity > peak.negativity {
            peak.negativity = report.negativity;
            peak.ct = prop.times()[ti];
        }
        peak.nu_min = peak.nu_min.min(report.min_nu());
    }
    Ok(peak)
}

fn scan_until(prop: &PairPropagation, pi: usize, product: &ProductState, target: f64) -> Result<f64> {
    let mut best = 0.0_f64;
    for ti in 0..prop.times().len() {
        best = best.max(prop.report(ti, pi, product)?.negativity);
        if best > target {
            break;
        }
    }
    Ok(best)
}

fn run_case(m: usize, r: f64, c: f64, deltas: &[f64], times: &[f64]) -> Result<CaseOutcome> {
    let net = network::build_interferometric(m, c)?;
    let h = quadratic::assemble(&net);
    let (r1, r2) = (net.references()[0], net.references()[1]);
    let (h1, h2) = (net.hubs()[0], net.hubs()[1]);
    let end = (
        net.index_of("1").expect("chain start"),
        net.index_of(&m.to_string()).expect("chain end"),
    );
    let pairs = [end, (h1, h2), (h1, r1), (h1, r2), (h2, r1), (h2, r2)];
    let prop = PairPropagation::new(&h, c, times, &pairs, &[r1, r2])?;

    let outcomes = deltas
        .par_iter()
        .map(|&delta| {
            let mut preps = vec![ModePreparation::Vacuum; net.len()];
            preps[r1] = ModePreparation::squeezed(r, 0.0)?;
            preps[r2] = ModePreparation::squeezed(r, delta)?;
            let product = ProductState::new(&preps)?;
            let verdict = analytic::entanglement_condition(r, delta).entangling;
            let hub_reference = if verdict {
                None
            } else {
                let mut worst = f64::INFINITY;
                for pi in 2..pairs.len() {
                    worst = worst.min(scan_until(&prop, pi, &product, HUB_REFERENCE_FLOOR)?);
                }
                Some(worst)
            };
            Ok(DeltaOutcome {
                delta,
                verdict,
                end: scan(&prop, 0, &product)?,
                hub: scan(&prop, 1, &product)?,
                hub_reference,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let zero_window = outcomes.iter().position(|d| !d.entangling()).map(|start| {
        let len = outcomes[start..].iter().take_while(|d| !d.entangling()).count();
        (outcomes[start].delta, outcomes[start + len - 1].delta)
    });
    let label = |k: usize| net.label(k).to_string();
    Ok(CaseOutcome {
        m,
        r,
        c,
        end_labels: (label(end.0), label(end.1)),
        hub_labels: (label(h1), label(h2)),
        deltas: outcomes,
        zero_window,
        expected_window: analytic::forbidden_window(r)?,
    })
}

fn check_case(case: &CaseOutcome, step: f64, failures: &mut Vec<Failure>) {
    let fail = |check, delta: Option<f64>, ct: Option<f64>, pair: Option<&(String, String)>, detail: String| Failure {
        check,
        m: Some(case.m),
        r: Some(case.r),
        c: Some(case.c),
        delta,
        ct,
        pair: pair.cloned(),
        detail,
    };
    for d in &case.deltas {
        if !d.verdict {
            if d.end.negativity >= ZERO_FLOOR {
                failures.push(fail(
                    Check::EndPairZero,
                    Some(d.delta),
                    Some(d.end.ct),
                    Some(&case.end_labels),
                    format!("N = {:e}", d.end.negativity),
                ));
            }
            if d.hub.negativity >= ZERO_FLOOR {
                failures.push(fail(
                    Check::HubPairZero,
                    Some(d.delta),
                    Some(d.hub.ct),
                    Some(&case.hub_labels),
                    format!("N = {:e}", d.hub.negativity),
                ));
            }
            if let Some(peak) = d.hub_reference.filter(|&p| p <= HUB_REFERENCE_FLOOR) {
                failures.push(fail(
                    Check::HubReferenceEntangled,
                    Some(d.delta),
                    None,
                    None,
                    format!("weakest hub-reference peak N = {peak:e}"),
                ));
            }
        }
        if d.entangling() != d.verdict {
            failures.push(fail(
                Check::Classification,
                Some(d.delta),
                Some(d.end.ct),
                Some(&case.end_labels),
                format!(
                    "numerical entangling = {}, exact verdict = {}",
                    d.entangling(),
                    d.verdict
                ),
            ));
        }
    }

    let (lo, hi) = case.expected_window;
    let slack = step * (1.0 + 1e-9);
    match case.zero_window {
        Some((a, b)) if (a - lo).abs() <= slack && (b - hi).abs() <= slack => {}
        other => failures.push(fail(
            Check::Boundary,
            None,
            None,
            Some(&case.end_labels),
            format!("zero window {other:?}, expected ({lo}, {hi}) within {step}"),
        )),
    }
}

fn check_coupling_independence(cases: &[CaseOutcome], failures: &mut Vec<Failure>) {
    for (i, case) in cases.iter().enumerate() {
        let Some(first) = cases[..i].iter().find(|o| o.m == case.m && o.r == case.r) else {
            continue;
        };
        let (a, b) = (first.classification(), case.classification());
        if let Some(k) = (0..a.len()).find(|&k| a[k] != b[k]) {
            failures.push(Failure {
                check: Check::CouplingIndependence,
                m: Some(case.m),
                r: Some(case.r),
                c: Some(case.c),
                delta: Some(case.deltas[k].delta),
                ct: None,
                pair: Some(case.end_labels.clone()),
                detail: format!("c = {} gives {}, c = {} gives {}", first.c, a[k], case.c, b[k]),
            });
        }
    }
}

/// Pairs checked for a classical preparation: every pair on small networks,
/// otherwise the references, hubs and chain ends.
fn baseline_pairs(net: &OscillatorNetwork, sources: &[usize]) -> Vec<(usize, usize)> {
    let n = net.len();
    if n <= 12 {
        return (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    }
    let mut key: Vec<usize> = sources.iter().chain(net.hubs()).copied().collect();
    key.extend(
        [net.index_of("1"), net.index_of(&(n - 2).to_string())]
            .into_iter()
            .flatten(),
    );
    key.sort_unstable();
    key.dedup();
    key.iter()
        .enumerate()
        .flat_map(|(i, &a)| key[i + 1..].iter().map(move |&b| (a, b)))
        .collect()
}

fn run_baselines(
    net: &OscillatorNetwork,
    sources: &[usize],
    topology: String,
    c: f64,
    times: &[f64],
) -> Result<Vec<BaselineOutcome>> {
    let h = quadratic::assemble(net);
    let pairs = baseline_pairs(net, sources);
    let prop = PairPropagation::new(&h, c, times, &pairs, sources)?;
    let preparations = [
        ("coherent", ModePreparation::Coherent),
        ("thermal:0.5", ModePreparation::thermal(0.5)?),
        ("thermal:2", ModePreparation::thermal(2.0)?),
    ];
    preparations
        .par_iter()
        .map(|(name, prep)| {
            let mut preps = vec![ModePreparation::Vacuum; net.len()];
            for &k in sources {
                preps[k] = *prep;
            }
            let product = ProductState::new(&preps)?;
            let mut max_negativity = 0.0_f64;
            for pi in 0..pairs.len() {
                for ti in 0..times.len() {
                    max_negativity = max_negativity.max(prop.report(ti, pi, &product)?.negativity);
                }
            }
            Ok(BaselineOutcome {
                topology: topology.clone(),
                preparation: name.to_string(),
                c,
                pairs: pairs.len(),
                max_negativity,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> LocalizationSpec {
        LocalizationSpec {
            ms: vec![2, 4],
            rs: vec![1.0],
            cs: vec![0.5, 1.0],
            delta_step: 0.05,
            grid: TimeGrid::new(20.0, 0.05).unwrap(),
            baselines: true,
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = localization_suite(&small_spec()).unwrap();
        assert!(report.passed(), "{:#?}", report.summary());
        assert_eq!(report.cases.len(), 4);
        // chain + 2 interferometric, 3 preparations, 2 couplings
        assert_eq!(report.baselines.len(), 18);
        let case = &report.cases[0];
        let (lo, hi) = case.zero_window.unwrap();
        assert!((lo - 1.41005).abs() <= 0.05 && (hi - 4.87313).abs() <= 0.05);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = small_spec();
        spec.ms = vec![3];
        assert!(localization_suite(&spec).is_err());
        let mut spec = small_spec();
        spec.rs = vec![0.0];
        assert!(localization_suite(&spec).is_err());
        let mut spec = small_spec();
        spec.delta_step = 0.0;
        assert!(localization_suite(&spec).is_err());
        let mut spec = small_spec();
        spec.cs.clear();
        assert!(localization_suite(&spec).is_err());
    }

    #[test]
    fn short_horizon_misses_far_entanglement() {
        // With ct ≤ 0.2 nothing reaches the ends of an M = 10 chain, so the
        // classification disagrees with the verdict and the suite fails.
        let spec = LocalizationSpec {
            ms: vec![10],
            rs: vec![1.0],
            cs: vec![1.0],
            delta_step: 0.1,
            grid: TimeGrid::new(0.2, 0.05).unwrap(),
            baselines: false,
        };
        let report = localization_suite(&spec).unwrap();
        assert!(!report.passed());
        assert!(report.failures_of(Check::Classification).count() > 0);
        assert!(report.summary().last().unwrap().starts_with("FAIL"));
    }

    #[test]
    fn delta_grid_is_half_open() {
        let spec = LocalizationSpec {
            delta_step: 0.5,
            ..small_spec()
        };
        let d = spec.deltas();
        assert_eq!(d.len(), 13);
        assert!(*d.last().unwrap() < TAU);
    }
}

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::gaussian::ModePreparation;
use crate::network::{self, OscillatorNetwork};

/// Where the oscillator network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    Interferometric {
        m: usize,
        c: f64,
    },
    Chain {
        n: usize,
        c: f64,
    },
    /// DSL file. `c` only sets the time unit: `t = ct / c`.
    File {
        path: PathBuf,
        c: f64,
    },
}

impl TopologySpec {
    /// Parses `interferometric:M=38,c=0.3`, `chain:n=10,c=1` or a file path.
    /// `file_c` is the time unit used for DSL files.
    pub fn parse(text: &str, file_c: f64) -> Result<Self> {
        let Some((kind, params)) = text.split_once(':') else {
            return Ok(Self::File {
                path: PathBuf::from(text),
                c: positive("c", file_c)?,
            });
        };
        let mut m = None;
        let mut n = None;
        let mut c = None;
        for item in params.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in topology, got `{item}`")))?;
            match key.trim() {
                "M" | "m" => m = Some(parse_usize(value)?),
                "n" | "N" => n = Some(parse_usize(value)?),
                "c" => c = Some(parse_f64(value)?),
                other => return Err(Error::Config(format!("unknown topology parameter `{other}`"))),
            }
        }
        let c = positive("c", c.unwrap_or(1.0))?;
        match kind {
            "interferometric" => Ok(Self::Interferometric {
                m: m.ok_or_else(|| Error::Config("interferometric topology needs M".into()))?,
                c,
            }),
            "chain" => Ok(Self::Chain {
                n: n.ok_or_else(|| Error::Config("chain topology needs n".into()))?,
                c,
            }),
            other => Err(Error::Config(format!("unknown topology builder `{other}`"))),
        }
    }

    pub fn time_unit(&self) -> f64 {
        match *self {
            Self::Interferometric { c, .. } | Self::Chain { c, .. } | Self::File { c, .. } => c,
        }
    }

    /// Builds the network and the label substituted for the symbol `M`.
    pub fn resolve(&self) -> Result<ResolvedTopology> {
        let (net, last) = match self {
            Self::Interferometric { m, c } => (network::build_interferometric(*m, *c)?, Some(m.to_string())),
            Self::Chain { n, c } => (network::build_chain(*n, *c)?, Some(n.to_string())),
            Self::File { path, .. } => {
                let text = std::fs::read_to_string(path)?;
                let net =
                    network::parse_topology(&text).map_err(|e| Error::Config(format!("{}:{e}", path.display())))?;
                (net, None)
            }
        };
        Ok(ResolvedTopology {
            net,
            c: self.time_unit(),
            last_label: last,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedTopology {
    pub net: OscillatorNetwork,
    /// Time unit: physical time is `ct / c`.
    pub c: f64,
    last_label: Option<String>,
}

impl ResolvedTopology {
    pub fn from_network(net: OscillatorNetwork, c: f64) -> Self {
        Self {
            net,
            c,
            last_label: None,
        }
    }

    /// Node index for a pair/prep token: a node label, or `M` for the last
    /// chain oscillator of a builder topology.
    pub fn node(&self, token: &str) -> Result<usize> {
        if let Some(k) = self.net.index_of(token) {
            return Ok(k);
        }
        if token == "M" {
            if let Some(label) = &self.last_label {
                return Ok(self.net.index_of(label).expect("builder label exists"));
            }
        }
        Err(Error::Config(format!("unknown node `{token}`")))
    }

    pub fn pair(&self, spec: &PairSpec) -> Result<(usize, usize)> {
        let a = self.node(&spec.0)?;
        let b = self.node(&spec.1)?;
        if a == b {
            return Err(Error::Config(format!(
                "pair `{},{}` names one node twice",
                spec.0, spec.1
            )));
        }
        Ok((a, b))
    }

    /// Per-mode preparations: vacuum everywhere, `squeezed(r, 0)` and
    /// `squeezed(r, δ)` on the two references, then explicit overrides.
    pub fn preparations(&self, r: f64, delta: f64, overrides: &[PrepOverride]) -> Result<Vec<ModePreparation>> {
        let mut preps = vec![ModePreparation::Vacuum; self.net.len()];
        let refs = self.net.references();
        if refs.len() > 2 {
            return Err(Error::Config(format!(
                "{} reference nodes declared; at most 2 are supported",
                refs.len()
            )));
        }
        for (&k, phi) in refs.iter().zip([0.0, delta]) {
            preps[k] = ModePreparation::squeezed(r, phi)?;
        }
        for o in overrides {
            preps[self.node(&o.node)?] = o.spec.to_preparation()?;
        }
        Ok(preps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec(pub String, pub String);

impl std::fmt::Display for PairSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

pub fn parse_pair(text: &str) -> Result<PairSpec> {
    match text.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok(PairSpec(a.into(), b.into())),
        _ => Err(Error::Config(format!("pair must be `a,b`, got `{text}`"))),
    }
}

/// Textual form of a [`ModePreparation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrepSpec {
    Vacuum,
    Coherent,
    Squeezed { r: f64, phi: f64 },
    Thermal { nbar: f64 },
}

impl PrepSpec {
    /// `vacuum | coherent | squeezed:r,phi | thermal:nbar`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let nums = || -> Result<Vec<f64>> { args.split(',').filter(|s| !s.is_empty()).map(parse_f64).collect() };
        match (kind, nums()?.as_slice()) {
            ("vacuum", []) => Ok(Self::Vacuum),
            ("coherent", []) => Ok(Self::Coherent),
            ("squeezed", &[r, phi]) => Ok(Self::Squeezed { r, phi }),
            ("squeezed", &[r]) => Ok(Self::Squeezed { r, phi: 0.0 }),
            ("thermal", &[nbar]) => Ok(Self::Thermal { nbar }),
            _ => Err(Error::Config(format!("invalid preparation `{text}`"))),
        }
    }

    pub fn to_preparation(self) -> Result<ModePreparation> {
        match self {
            Self::Vacuum => Ok(ModePreparation::Vacuum),
            Self::Coherent => Ok(ModePreparation::Coherent),
            Self::Squeezed { r, phi } => ModePreparation::squeezed(r, phi),
            Self::Thermal { nbar } => ModePreparation::thermal(nbar),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepOverride {
    pub node: String,
    pub spec: PrepSpec,
}

impl PrepOverride {
    /// `node=spec`.
    pub fn parse(text: &str) -> Result<Self> {
        let (node, spec) = text
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("preparation must be `node=spec`, got `{text}`")))?;
        Ok(Self {
            node: node.trim().to_string(),
            spec: PrepSpec::parse(spec.trim())?,
        })
    }
}

/// Uniform grid `ct_k = k · step`, `k = 0..=⌊ct_max/step⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub ct_max: f64,
    pub ct_step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            ct_max: 80.0,
            ct_step: 0.05,
        }
    }
}

impl TimeGrid {
    pub fn new(ct_max: f64, ct_step: f64) -> Result<Self> {
        let grid = Self { ct_max, ct_step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ct_step > 0.0 && self.ct_step.is_finite()) {
            return Err(Error::Config(format!("ct step must be positive, got {}", self.ct_step)));
        }
        if !(self.ct_max >= 0.0 && self.ct_max.is_finite()) {
            return Err(Error::Config(format!("ct max must be >= 0, got {}", self.ct_max)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = (self.ct_max / self.ct_step + 1e-9).floor() as usize;
        (0..=count).map(|k| k as f64 * self.ct_step).collect()
    }
}

/// Parses a float, a comma list, or an inclusive range `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts[..] {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(Error::Config(format!("invalid range `{text}`")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| start + k as f64 * step).collect()
        }
        [list] => list.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Config(format!("invalid grid `{text}`"))),
    };
    if values.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    Ok(values)
}

/// When a sweep point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    At(f64),
    /// First strict local maximum over the time grid, restricted to
    /// `ct < ct_max`.
    FirstLocalMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub squeezing: Vec<f64>,
    pub deltas: Vec<f64>,
    pub overrides: Vec<PrepOverride>,
    pub grid: TimeGrid,
    pub evaluation: Evaluation,
    pub pairs: Vec<PairSpec>,
}

impl ExperimentConfig {
    /// `M = 38`, `c = 1`, `r = 1`, `δ = 0`, pair `(1, M)`, `ct ∈ [0, 80]`.
    pub fn new(topology: TopologySpec) -> Self {
        Self {
            topology,
            squeezing: vec![1.0],
            deltas: vec![0.0],
            overrides: Vec::new(),
            grid: TimeGrid::default(),
            evaluation: Evaluation::At(58.0),
            pairs: vec![PairSpec("1".into(), "M".into())],
        }
    }

    /// One-line summary kept with results.
    pub fn echo(&self) -> String {
        format!(
            "topology={:?} r={:?} delta={:?} overrides={:?} grid={:?} eval={:?} pairs={}",
            self.topology,
            self.squeezing,
            self.deltas,
            self.overrides,
            self.grid,
            self.evaluation,
            self.pairs
                .iter()
                .map(|p| format!("({p})"))
                .collect::<Vec<_>>()
                .join(";")
        )
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    let v: f64 = match s {
        "pi" => std::f64::consts::PI,
        "2pi" => std::f64::consts::TAU,
        _ => s.parse().map_err(|_| Error::Config(format!("invalid number `{s}`")))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("number must be finite, got `{s}`")))
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid integer `{s}`")))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_strings() {
        assert_eq!(
            TopologySpec::parse("interferometric:M=38,c=0.3", 1.0).unwrap(),
            TopologySpec::Interferometric { m: 38, c: 0.3 }
        );
        assert_eq!(
            TopologySpec::parse("chain:n=10", 1.0).unwrap(),
            TopologySpec::Chain { n: 10, c: 1.0 }
        );
        assert!(matches!(
            TopologySpec::parse("ring.dsl", 0.5).unwrap(),
            TopologySpec::File { c, .. } if c == 0.5
        ));
        assert!(TopologySpec::parse("interferometric:c=1", 1.0).is_err());
        assert!(TopologySpec::parse("interferometric:M=4,c=-1", 1.0).is_err());
        assert!(TopologySpec::parse("lattice:n=3", 1.0).is_err());
        assert!(TopologySpec::parse("chain:n=3,k=2", 1.0).is_err());
    }

    #[test]
    fn symbolic_pair_resolution() {
        let topo = TopologySpec::Interferometric { m: 38, c: 0.3 }.resolve().unwrap();
        assert_eq!(topo.pair(&parse_pair("1,M").unwrap()).unwrap(), (2, 39));
        assert_eq!(topo.pair(&parse_pair("19,20").unwrap()).unwrap(), (20, 21));
        assert_eq!(topo.pair(&parse_pair("r1,19").unwrap()).unwrap(), (0, 20));
        assert!(topo.pair(&parse_pair("1,1").unwrap()).is_err());
        assert!(topo.pair(&parse_pair("1,40").unwrap()).is_err());
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,2,3").is_err());

        let chain = TopologySpec::Chain { n: 10, c: 1.0 }.resolve().unwrap();
        assert_eq!(chain.pair(&parse_pair("1,M").unwrap()).unwrap(), (0, 9));
    }

    #[test]
    fn default_and_overridden_preparations() {
        let topo = TopologySpec::Interferometric { m: 4, c: 1.0 }.resolve().unwrap();
        let preps = topo.preparations(1.0, 0.5, &[]).unwrap();
        assert_eq!(preps[0], ModePreparation::squeezed(1.0, 0.0).unwrap());
        assert_eq!(preps[1], ModePreparation::squeezed(1.0, 0.5).unwrap());
        assert!(preps[2..].iter().all(|p| *p == ModePreparation::Vacuum));

        let overrides = [
            PrepOverride::parse("r1=thermal:2").unwrap(),
            PrepOverride::parse("M=coherent").unwrap(),
        ];
        let preps = topo.preparations(1.0, 0.5, &overrides).unwrap();
        assert_eq!(preps[0], ModePreparation::Thermal { nbar: 2.0 });
        assert_eq!(preps[5], ModePreparation::Coherent);
        assert!(topo.preparations(-1.0, 0.0, &[]).is_err());
    }

    #[test]
    fn preparation_strings() {
        assert_eq!(PrepSpec::parse("vacuum").unwrap(), PrepSpec::Vacuum);
        assert_eq!(PrepSpec::parse("coherent").unwrap(), PrepSpec::Coherent);
        assert_eq!(
            PrepSpec::parse("squeezed:1,0.5").unwrap(),
            PrepSpec::Squeezed { r: 1.0, phi: 0.5 }
        );
        assert_eq!(PrepSpec::parse("thermal:0.5").unwrap(), PrepSpec::Thermal { nbar: 0.5 });
        assert!(PrepSpec::parse("thermal").is_err());
        assert!(PrepSpec::parse("cat:1").is_err());
        assert!(PrepSpec::parse("vacuum:1").is_err());
        assert!(PrepOverride::parse("vacuum").is_err());
        assert!(PrepSpec::parse("thermal:-1").unwrap().to_preparation().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("0,1.5,2").unwrap(), vec![0.0, 1.5, 2.0]);
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().len(), 4);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
        assert_eq!(parse_grid("pi").unwrap(), vec![std::f64::consts::PI]);
    }

    #[test]
    fn time_grid_points() {
        let g = TimeGrid::default();
        let pts = g.points();
        assert_eq!(pts.len(), 1601);
        assert_eq!(pts[1160], 58.0);
        assert_eq!(*pts.last().unwrap(), 80.0);
        let half = TimeGrid::new(80.0, 0.025).unwrap().points();
        for (k, t) in pts.iter().enumerate() {
            assert_eq!(half[2 * k], *t);
        }
        assert!(TimeGrid::new(1.0, 0.0).is_err());
        assert!(TimeGrid::new(-1.0, 0.1).is_err());
    }
}

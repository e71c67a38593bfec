//! Run configuration: a TOML document naming the algebroid, the suites and
//! the window parameters. Command-line flags override individual keys.

use std::collections::BTreeMap;
use std::path::PathBuf;

use algebroid::{builtin, AlgebroidPresentation, Builtin, LieTable};
use exactalg::{BaseRing, Poly};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Validate,
    Pbw,
    Dual,
    Koszul,
    Diagonal,
    Gorenstein,
    Tau,
    Beilinson,
    Ktheory,
    Ideals,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Validate,
        Suite::Pbw,
        Suite::Dual,
        Suite::Koszul,
        Suite::Diagonal,
        Suite::Gorenstein,
        Suite::Tau,
        Suite::Beilinson,
        Suite::Ktheory,
        Suite::Ideals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::Pbw => "pbw",
            Suite::Dual => "dual",
            Suite::Koszul => "koszul",
            Suite::Diagonal => "diagonal",
            Suite::Gorenstein => "gorenstein",
            Suite::Tau => "tau",
            Suite::Beilinson => "beilinson",
            Suite::Ktheory => "ktheory",
            Suite::Ideals => "ideals",
        }
    }

    /// Suites whose computations only exist over a point base, with the
    /// restriction that the underlying module states.
    pub fn point_base_restriction(self) -> Option<&'static str> {
        match self {
            Suite::Diagonal => Some("koszul: the bicomplex and the diagonal resolution need a point base"),
            Suite::Tau => Some("sections: derived sections need a point base"),
            Suite::Beilinson => Some("beilinson: the algebra E needs a point base"),
            Suite::Ktheory => Some("beilinson: K-classes need a point base"),
            Suite::Ideals => Some("sections: derived sections need a point base"),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Exact,
    /// Ranks over a polynomial base by evaluation at seeded random points.
    Evaluation,
}

/// Either `builtin = "sl2"` or an explicit table: `variables`, `rank`,
/// `bracket."i,j" = [[k, "poly"], …]` and `anchor."i" = [["x", "poly"], …]`,
/// with 0-based generator indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bracket: BTreeMap<String, Vec<(usize, String)>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub anchor: BTreeMap<String, Vec<(String, String)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Window {
    /// D: top internal degree for pbw, dual, koszul and gorenstein.
    pub degree: i64,
    pub p: i64,
    pub q: i64,
    /// Largest k for R^kτ; n + 2 when absent.
    pub k_max: Option<usize>,
    /// Degree window for tau and ktheory; −n − 3 and 2 when absent.
    pub j_min: Option<i64>,
    pub j_max: Option<i64>,
    pub truncation_budget: u32,
    /// Width of the tail compared in round trips.
    pub tail: i64,
}

impl Default for Window {
    fn default() -> Self {
        Window { degree: 6, p: 4, q: 4, k_max: None, j_min: None, j_max: None, truncation_budget: 0, tail: 2 }
    }
}

impl Window {
    pub fn k_max(&self, n: usize) -> usize {
        self.k_max.unwrap_or(n + 2)
    }

    pub fn degrees(&self, n: usize) -> (i64, i64) {
        (self.j_min.unwrap_or(-(n as i64) - 3), self.j_max.unwrap_or(2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealTarget {
    pub generators: Vec<String>,
    #[serde(default = "IdealTarget::default_top")]
    pub top: i64,
    #[serde(default = "IdealTarget::default_depth")]
    pub depth: u32,
    #[serde(default = "IdealTarget::default_exact_through")]
    pub exact_through: i64,
}

impl IdealTarget {
    fn default_top() -> i64 {
        5
    }

    fn default_depth() -> u32 {
        3
    }

    fn default_exact_through() -> i64 {
        14
    }

    pub fn new(generators: &[&str]) -> Self {
        IdealTarget {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            top: Self::default_top(),
            depth: Self::default_depth(),
            exact_through: Self::default_exact_through(),
        }
    }

    pub fn label(&self) -> String {
        format!("({})", self.generators.join(", "))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Targets {
    /// Twists s of Ũ(s) for beilinson and ktheory; −n..=n when absent.
    pub twists: Option<Vec<i64>>,
    pub ideals: Vec<IdealTarget>,
}

impl Targets {
    pub fn twists(&self, n: usize) -> Vec<i64> {
        self.twists.clone().unwrap_or_else(|| (-(n as i64)..=n as i64).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebroid: AlgebroidSource,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub seed: u64,
    /// Not echoed: reports must not depend on where the cache lives.
    #[serde(default, skip_serializing)]
    pub workspace: Option<PathBuf>,
    #[serde(default)]
    pub targets: Targets,
}

impl RunConfig {
    pub fn builtin(name: &str, suites: &[Suite]) -> Self {
        RunConfig {
            algebroid: AlgebroidSource { builtin: Some(name.to_string()), ..Default::default() },
            suites: suites.to_vec(),
            window: Window::default(),
            strategy: Strategy::Exact,
            seed: 0,
            workspace: None,
            targets: Targets::default(),
        }
    }

    pub fn parse(src: &str) -> Result<Self, RunError> {
        toml::from_str(src).map_err(|e| RunError::Usage(format!("config does not parse: {e}")))
    }

    /// Checks the invariants and puts the suites in canonical order.
    pub fn normalized(mut self) -> Result<Self, RunError> {
        if self.suites.is_empty() {
            return Err(RunError::Usage("no suites selected".into()));
        }
        self.suites.sort_unstable();
        self.suites.dedup();
        let w = &self.window;
        if w.degree < 1 || w.p < 1 || w.q < 1 || w.tail < 1 || w.k_max == Some(0) {
            return Err(RunError::Usage("window parameters must be positive".into()));
        }
        if let (Some(lo), Some(hi)) = (w.j_min, w.j_max) {
            if lo > hi {
                return Err(RunError::Usage(format!("empty degree window [{lo}, {hi}]")));
            }
        }
        if self.targets.ideals.iter().any(|i| i.generators.is_empty()) {
            return Err(RunError::Usage("an ideal target has no generators".into()));
        }
        Ok(self)
    }
}

fn usage<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Usage(e.to_string())
}

fn parse_builtin(name: &str) -> Result<Builtin, RunError> {
    let name = name.trim();
    if name == "sl2" {
        return Ok(Builtin::LieAlgebra(LieTable::sl2()));
    }
    let (head, arg) = name
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(|| RunError::Usage(format!("unknown builtin '{name}'")))?;
    let k: usize = arg.trim().parse().map_err(|_| RunError::Usage(format!("bad argument in '{name}'")))?;
    if k == 0 {
        return Err(RunError::Usage(format!("'{name}' needs a positive argument")));
    }
    match head.trim() {
        "abelian" => Ok(Builtin::Abelian(k)),
        "weyl" => Ok(Builtin::Weyl(k)),
        "tangent" => Ok(Builtin::TangentAffine(k)),
        _ => Err(RunError::Usage(format!("unknown builtin '{name}'"))),
    }
}

fn parse_index(key: &str, rank: usize) -> Result<usize, RunError> {
    let i: usize = key.trim().parse().map_err(|_| RunError::Usage(format!("bad generator index '{key}'")))?;
    if i >= rank {
        return Err(RunError::Usage(format!("generator index {i} out of range for rank {rank}")));
    }
    Ok(i)
}

impl AlgebroidSource {
    /// Bracket entries are taken as given; an entry "i,j" whose mirror "j,i"
    /// is absent also fills the mirror with the negated coefficients.
    pub fn presentation(&self) -> Result<AlgebroidPresentation, RunError> {
        match (&self.builtin, self.rank) {
            (Some(name), None) => {
                if !self.variables.is_empty() || !self.bracket.is_empty() || !self.anchor.is_empty() || self.names.is_some() {
                    return Err(RunError::Usage("a builtin algebroid takes no table keys".into()));
                }
                builtin(&parse_builtin(name)?).map_err(usage)
            }
            (None, Some(rank)) => self.table(rank),
            (Some(_), Some(_)) => Err(RunError::Usage("give either algebroid.builtin or algebroid.rank, not both".into())),
            (None, None) => Err(RunError::Usage("algebroid needs builtin or rank".into())),
        }
    }

    fn table(&self, rank: usize) -> Result<AlgebroidPresentation, RunError> {
        if rank == 0 {
            return Err(RunError::Usage("algebroid.rank must be positive".into()));
        }
        let base = if self.variables.is_empty() { BaseRing::rationals() } else { BaseRing::polynomial(self.variables.clone()) };
        let names = match &self.names {
            Some(n) if n.len() != rank => return Err(RunError::Usage("algebroid.names must have rank entries".into())),
            Some(n) => n.clone(),
            None => (1..=rank).map(|i| format!("l{i}")).collect(),
        };
        let mut given: BTreeMap<(usize, usize), Vec<Poly>> = BTreeMap::new();
        for (key, terms) in &self.bracket {
            let (a, b) = key.split_once(',').ok_or_else(|| RunError::Usage(format!("bracket key '{key}' is not \"i,j\"")))?;
            let (i, j) = (parse_index(a, rank)?, parse_index(b, rank)?);
            let mut c = vec![Poly::zero(); rank];
            for (k, src) in terms {
                if *k >= rank {
                    return Err(RunError::Usage(format!("bracket '{key}' names generator {k} out of range")));
                }
                c[*k] = &c[*k] + &base.parse(src).map_err(usage)?;
            }
            given.insert((i, j), c);
        }
        let mut bracket = vec![vec![vec![Poly::zero(); rank]; rank]; rank];
        for (&(i, j), c) in &given {
            bracket[i][j] = c.clone();
            if !given.contains_key(&(j, i)) {
                bracket[j][i] = c.iter().map(|p| -p).collect();
            }
        }
        let mut anchor = vec![vec![Poly::zero(); base.nvars()]; rank];
        for (key, terms) in &self.anchor {
            let i = parse_index(key, rank)?;
            for (var, src) in terms {
                let m = base
                    .variables()
                    .iter()
                    .position(|v| v == var)
                    .ok_or_else(|| RunError::Usage(format!("anchor names undeclared variable '{var}'")))?;
                anchor[i][m] = &anchor[i][m] + &base.parse(src).map_err(usage)?;
            }
        }
        AlgebroidPresentation::new(base, names, bracket, anchor).map_err(usage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_table_matches_builtin_weyl() {
        let cfg = RunConfig::parse(
            r#"
            suites = ["validate"]
            [algebroid]
            variables = ["x"]
            names = ["dx"]
            rank = 1
            [algebroid.anchor]
            "0" = [["x", "1"]]
            "#,
        )
        .unwrap();
        let p = cfg.algebroid.presentation().unwrap();
        assert_eq!(p.canonical_string(), algebroid::weyl(1).canonical_string());
    }

    #[test]
    fn explicit_sl2_table_fills_mirrors() {
        let cfg = RunConfig::parse(
            r#"
            suites = ["pbw"]
            [algebroid]
            names = ["e", "f", "h"]
            rank = 3
            [algebroid.bracket]
            "0,1" = [[2, "1"]]
            "0,2" = [[0, "-2"]]
            "1,2" = [[1, "2"]]
            "#,
        )
        .unwrap();
        let p = cfg.algebroid.presentation().unwrap();
        assert_eq!(p.canonical_string(), algebroid::sl2().canonical_string());
    }

    #[test]
    fn builtin_names() {
        assert!(matches!(parse_builtin("abelian(2)"), Ok(Builtin::Abelian(2))));
        assert!(matches!(parse_builtin("weyl( 1 )"), Ok(Builtin::Weyl(1))));
        assert!(parse_builtin("so3").is_err());
        assert!(parse_builtin("abelian(0)").is_err());
    }

    #[test]
    fn empty_suites_and_bad_windows_are_usage_errors() {
        let cfg = RunConfig::builtin("sl2", &[]);
        assert!(matches!(cfg.normalized(), Err(RunError::Usage(_))));
        let mut cfg = RunConfig::builtin("sl2", &[Suite::Pbw]);
        cfg.window.degree = 0;
        assert!(matches!(cfg.normalized(), Err(RunError::Usage(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("suites = [\"pbw\"]\nfoo = 1\n[algebroid]\nbuiltin = \"sl2\"\n").is_err());
    }
}

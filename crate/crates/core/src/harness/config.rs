use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ck::smallness_of;
use crate::error::{Error, Result};
use crate::exact::ModelConstants;
use crate::series::{MultiIndex, NormParams, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub q: f64,
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    /// truncation order `s`
    pub order: usize,
    pub big_r: f64,
    pub small_r: f64,
    pub c0: f64,
    /// accepted `ε_0`
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_width: f64,
    /// nodes per axis
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    pub residual: bool,
    pub weiss: bool,
    pub free_boundary: bool,
    pub norms: bool,
    pub direct: bool,
    pub weiss_radii: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub plots: Vec<String>,
}

/// One Cauchy-data coefficient: the monomial `y'^index` carries `value[j]` in
/// component `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataTerm {
    pub index: Vec<u32>,
    pub value: Vec<f64>,
}

/// A scenario in TOML: `name`, then `[model]`, `[series]`, `[grid]`,
/// `[checks]`, `[output]` and any number of `[[data]]` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelSection,
    pub series: SeriesSection,
    pub grid: GridSection,
    pub checks: CheckSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub data: Vec<DataTerm>,
}

impl ScenarioConfig {
    /// Flat boundary, one component, `q = 1/2`, all checks but the direct solve.
    pub fn flat(name: &str) -> Self {
        ScenarioConfig {
            name: name.into(),
            model: ModelSection { q: 0.5, n: 2, m: 1 },
            series: SeriesSection { order: 8, big_r: 0.5, small_r: 0.1, c0: 2.0, threshold: 0.1 },
            grid: GridSection { half_width: 0.5, count: 65 },
            checks: CheckSection {
                residual: true,
                weiss: true,
                free_boundary: true,
                norms: true,
                direct: false,
                weiss_radii: vec![0.05, 0.1, 0.2],
            },
            output: OutputSection::default(),
            data: Vec::new(),
        }
    }

    /// `x_n = ε y_1^2`.
    pub fn parabolic(name: &str, eps: f64) -> Self {
        let mut c = Self::flat(name);
        c.data.push(DataTerm { index: vec![2], value: vec![eps] });
        c
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::Parse { line, msg: e.message().to_string() }
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn constants(&self) -> Result<ModelConstants> {
        let ModelSection { q, n, m } = self.model;
        if n != 2 && n != 3 {
            return Err(Error::InvalidArgument(format!("n must be 2 or 3, got {n}")));
        }
        ModelConstants::new(q, n, m)
    }

    pub fn norm_params(&self) -> Result<NormParams> {
        NormParams::new(self.series.big_r, self.series.small_r, self.series.order)
    }

    /// Cauchy data `v_0` as series in all `n` variables.
    pub fn cauchy_data(&self) -> Result<Vec<TruncatedSeries<f64>>> {
        let (n, m, s) = (self.model.n, self.model.m, self.series.order);
        let mut v0 = vec![TruncatedSeries::zero(n, s); m];
        for t in &self.data {
            if t.index.len() != n - 1 || t.value.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "data term {:?} needs {} index entries and {m} values",
                    t.index,
                    n - 1
                )));
            }
            let mut e = t.index.clone();
            e.push(0);
            let mu = MultiIndex::new(e);
            if mu.total() as usize > s {
                return Err(Error::InvalidArgument(format!("data term {mu} exceeds order {s}")));
            }
            for (j, v) in t.value.iter().enumerate() {
                let c = v0[j].coeff(&mu) + v * mu.factorial();
                v0[j].set(&mu, c);
            }
        }
        Ok(v0)
    }

    /// Every precondition the pipeline relies on.
    pub fn validate(&self) -> Result<()> {
        self.constants()?;
        self.norm_params()?;
        if self.series.order < 2 || self.series.order > 40 {
            return Err(Error::OrderOverflow(self.series.order, 40));
        }
        if !(self.grid.half_width > 0.0) || self.grid.count < 5 {
            return Err(Error::InvalidArgument("grid needs half_width > 0 and at least 5 nodes".into()));
        }
        if self.checks.weiss_radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::InvalidArgument("Weiss radii must be positive".into()));
        }
        if let Some(p) = self.output.plots.iter().find(|p| !super::report::PLOT_SELECTORS.contains(&p.as_str())) {
            return Err(Error::UnknownSelector(p.clone()));
        }
        let e = smallness_of(&self.cauchy_data()?);
        if e > self.series.threshold {
            return Err(Error::SmallnessViolated { epsilon0: e, threshold: self.series.threshold });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut c = ScenarioConfig::parabolic("p", 0.01);
        c.output.plots = vec!["fb".into(), "weiss".into()];
        c.output.dir = Some("out".into());
        let text = c.to_text();
        assert_eq!(ScenarioConfig::parse(&text).unwrap(), c);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_large_data() {
        let mut c = ScenarioConfig::flat("big");
        c.data.push(DataTerm { index: vec![1], value: vec![0.5] });
        assert!(matches!(c.validate(), Err(Error::SmallnessViolated { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ScenarioConfig::flat("x");
        c.model.q = 1.0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::flat("x");
        c.model.n = 4;
        assert!(c.validate().is_err());
        let text = ScenarioConfig::flat("x").to_text().replace("[grid]", "[grid]\nbogus = 1");
        assert!(matches!(ScenarioConfig::parse(&text), Err(Error::Parse { .. })));
    }
}

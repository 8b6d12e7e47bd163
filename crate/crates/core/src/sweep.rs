//! Parameter grids: evaluating steady states and observables over one or two
//! axes, and the fixed grids behind the published figures.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{ObservableSet, OBSERVABLE_COLUMNS};
use crate::output::{fmt_num, fmt_opt};
use crate::params::{ParamName, SystemParams};
use crate::statespace::X_STATE_COLUMNS;
use crate::steadystate::{analytic, classify, Regime, SteadyStateResult};

/// Caps the worker count of [`run_sweep`].
pub const THREADS_ENV: &str = "MODECOUPLER_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum AxisName {
    Param(ParamName),
    /// Initial dark-state population, used only by singular points.
    Pdd0,
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisName::Param(p) => f.write_str(p.as_str()),
            AxisName::Pdd0 => f.write_str("pdd0"),
        }
    }
}

impl From<AxisName> for String {
    fn from(a: AxisName) -> String {
        a.to_string()
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "pdd0" {
            Ok(AxisName::Pdd0)
        } else {
            s.parse().map(AxisName::Param)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let label = name.to_string();
        if count < 2 {
            return Err(Error::domain(label, format!("an axis needs at least 2 points, got {count}")));
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::domain(label, "axis range must be finite"));
        }
        if spacing == Spacing::Log && !(min > 0.0 && max > 0.0) {
            return Err(Error::domain(label, "a log axis needs a positive range"));
        }
        let unit = 0.0..=1.0;
        if name == AxisName::Pdd0 && !(unit.contains(&min) && unit.contains(&max)) {
            return Err(Error::domain(label, "pdd0 must stay within [0, 1]"));
        }
        Ok(Axis { name, min, max, count, spacing })
    }

    pub fn linear(name: AxisName, min: f64, max: f64, count: usize) -> Result<Self> {
        Axis::new(name, min, max, count, Spacing::Linear)
    }

    /// Grid values; both end points are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    return self.max;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

/// `name=min:max:count` with an optional `:log` suffix.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain("axis", format!("expected name=min:max:count[:log], got `{s}`"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        let spacing = match parts.get(3).map(|t| t.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        Axis::new(name.trim().parse()?, num(parts[0])?, num(parts[1])?, count, spacing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axes: Vec<Axis>,
    /// Observable columns to emit, a subset of [`OBSERVABLE_COLUMNS`].
    pub outputs: Vec<String>,
    /// Initial dark population for singular points. `None` leaves them
    /// unevaluated.
    pub pdd0: Option<f64>,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>) -> Result<Self> {
        SweepSpec {
            base,
            axes,
            outputs: OBSERVABLE_COLUMNS.iter().map(|c| c.to_string()).collect(),
            pdd0: Some(0.0),
        }
        .validate()
    }

    pub fn with_outputs(mut self, outputs: &[&str]) -> Result<Self> {
        self.outputs = outputs.iter().map(|c| c.to_string()).collect();
        self.validate()
    }

    pub fn with_pdd0(mut self, pdd0: Option<f64>) -> Result<Self> {
        self.pdd0 = pdd0;
        self.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if !(1..=2).contains(&self.axes.len()) {
            return Err(Error::domain("axes", format!("need 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::domain("axes", "the two axes must differ"));
        }
        for a in &self.axes {
            Axis::new(a.name, a.min, a.max, a.count, a.spacing)?;
        }
        for c in &self.outputs {
            if !OBSERVABLE_COLUMNS.contains(&c.as_str()) {
                return Err(Error::domain("outputs", format!("unknown column `{c}`")));
            }
        }
        if let Some(p) = self.pdd0 {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain("pdd0", format!("must lie in [0, 1], got {p}")));
            }
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates in row-major order, the last axis fastest.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        (0..self.len())
            .map(|mut k| {
                let mut c = vec![0.0; values.len()];
                for (slot, v) in c.iter_mut().zip(&values).rev() {
                    *slot = v[k % v.len()];
                    k /= v.len();
                }
                c
            })
            .collect()
    }

    /// Evaluates one grid point.
    pub fn evaluate(&self, coords: &[f64]) -> SweepRow {
        let mut pdd0 = self.pdd0;
        let mut params = Ok(self.base);
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.name {
                AxisName::Pdd0 => pdd0 = Some(v),
                AxisName::Param(name) => params = params.and_then(|p| p.set(name, v)),
            }
        }
        let params = match params {
            Ok(p) => p,
            Err(e) => {
                return SweepRow { coords: coords.to_vec(), params: None, regime: None, outcome: Err(e.to_string()) }
            }
        };
        let regime = classify(&params);
        let outcome = if regime.is_singular() && pdd0.is_none() {
            Err("singular point left unevaluated: no pdd0 supplied".to_string())
        } else {
            analytic(&params, pdd0)
                .map(|steady| {
                    let observables = ObservableSet::from_state(&steady.rho);
                    SweepPoint { steady, observables }
                })
                .map_err(|e| e.to_string())
        };
        SweepRow { coords: coords.to_vec(), params: Some(params), regime: Some(regime), outcome }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub steady: SteadyStateResult,
    pub observables: ObservableSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    /// `None` when the axis values do not form a valid parameter set.
    pub params: Option<SystemParams>,
    pub regime: Option<Regime>,
    pub outcome: std::result::Result<SweepPoint, String>,
}

impl SweepRow {
    pub fn point(&self) -> Option<&SweepPoint> {
        self.outcome.as_ref().ok()
    }

    pub fn observable(&self, column: &str) -> Option<f64> {
        let idx = OBSERVABLE_COLUMNS.iter().position(|c| *c == column)?;
        self.point()?.observables.values()[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

const PARAM_COLUMNS: [&str; 6] = ["omega", "kappa", "epsilon", "gamma_a", "gamma_b", "gamma"];

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    spec: &'a SweepSpec,
    rows: usize,
    regimes: Vec<Option<&'static str>>,
    errors: Vec<(usize, &'a str)>,
}

impl SweepTable {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = vec!["index".into()];
        h.extend(self.spec.axes.iter().map(|a| a.name.to_string()));
        h.extend(PARAM_COLUMNS.iter().map(|c| c.to_string()));
        h.extend(["regime", "singular", "initial_pdd"].map(String::from));
        h.extend(X_STATE_COLUMNS.iter().map(|c| c.to_string()));
        h.extend(["abs_rho23", "abs_rho14"].map(String::from));
        h.extend(self.spec.outputs.iter().cloned());
        h.push("error".into());
        h
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        let picks: Vec<usize> = self
            .spec
            .outputs
            .iter()
            .map(|c| OBSERVABLE_COLUMNS.iter().position(|o| o == c).expect("validated column"))
            .collect();
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.coords.iter().map(|v| fmt_num(*v)));
            match &row.params {
                Some(p) => rec.extend(
                    [p.omega(), p.kappa(), p.epsilon(), p.gamma_a(), p.gamma_b(), p.gamma()].map(fmt_num),
                ),
                None => rec.extend(PARAM_COLUMNS.map(|_| String::new())),
            }
            rec.push(row.regime.map(|r| r.label().to_string()).unwrap_or_default());
            let blanks = 2 + X_STATE_COLUMNS.len() + 2 + picks.len();
            match &row.outcome {
                Ok(pt) => {
                    let s = &pt.steady;
                    rec.push(s.singular.to_string());
                    rec.push(fmt_opt(s.initial_pdd));
                    rec.extend(s.rho.csv_values().iter().map(|v| fmt_num(*v)));
                    rec.push(fmt_num(s.rho.rho23.norm()));
                    rec.push(fmt_num(s.rho.rho14.norm()));
                    let vals = pt.observables.values();
                    rec.extend(picks.iter().map(|&k| fmt_opt(vals[k])));
                    rec.push(String::new());
                }
                Err(msg) => {
                    rec.extend(std::iter::repeat_n(String::new(), blanks));
                    rec.push(msg.clone());
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sidecar_json(&self) -> Result<String> {
        let sidecar = Sidecar {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec: &self.spec,
            rows: self.rows.len(),
            regimes: self.rows.iter().map(|r| r.regime.map(Regime::label)).collect(),
            errors: self
                .rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.outcome.as_ref().err().map(|e| (i, e.as_str())))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&sidecar)?)
    }

    /// Writes the CSV and its JSON sidecar next to it; returns the sidecar path.
    pub fn write_files(&self, csv_path: &Path) -> Result<PathBuf> {
        let mut f = BufWriter::new(File::create(csv_path)?);
        self.write_csv(&mut f)?;
        drop(f);
        let side = sidecar_path(csv_path);
        std::fs::write(&side, self.sidecar_json()?)?;
        Ok(side)
    }

    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Evaluates every grid point in parallel. Per-point failures are recorded
/// in the row, never returned.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let spec = spec.clone().validate()?;
    let coords = spec.coordinates();
    let work = || coords.par_iter().map(|c| spec.evaluate(c)).collect::<Vec<_>>();
    let rows = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain(THREADS_ENV, e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(SweepTable { spec, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5,
    Fig6a,
    Fig6b,
    Fig6c,
}

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        FigureId::Fig2,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig4c,
        FigureId::Fig5,
        FigureId::Fig6a,
        FigureId::Fig6b,
        FigureId::Fig6c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig4c => "fig4c",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
            FigureId::Fig6c => "fig6c",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::domain("figure", format!("unknown figure `{s}`")))
    }
}

pub const MIN_FIGURE_RESOLUTION: usize = 16;

/// Default (κ, ε) window of the coupling-plane figures, in units of ω.
pub const COUPLING_KAPPA_RANGE: (f64, f64) = (0.0, 0.1);
pub const COUPLING_EPSILON_RANGE: (f64, f64) = (0.0, 4.0);

/// Axis overrides for [`figure_spec`]; `None` keeps the figure default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FigureRanges {
    pub first: Option<(f64, f64)>,
    pub second: Option<(f64, f64)>,
}

fn coupling_plane(
    gamma_a: f64,
    gamma_b: f64,
    gamma: f64,
    n: usize,
    ranges: FigureRanges,
    outputs: &[&str],
) -> Result<SweepSpec> {
    let base = SystemParams::new(1.0, 0.0, 0.0, gamma_a, gamma_b, gamma)?;
    let (k0, k1) = ranges.first.unwrap_or(COUPLING_KAPPA_RANGE);
    let (e0, e1) = ranges.second.unwrap_or(COUPLING_EPSILON_RANGE);
    SweepSpec::new(
        base,
        vec![
            Axis::linear(AxisName::Param(ParamName::Kappa), k0, k1, n)?,
            Axis::linear(AxisName::Param(ParamName::Epsilon), e0, e1, n)?,
        ],
    )?
    .with_outputs(outputs)
}

/// Grid and fixed parameters of a figure, with ω = 1.
pub fn figure_spec(id: FigureId, resolution: usize, ranges: FigureRanges) -> Result<SweepSpec> {
    if resolution < MIN_FIGURE_RESOLUTION {
        return Err(Error::domain(
            "resolution",
            format!("must be at least {MIN_FIGURE_RESOLUTION}, got {resolution}"),
        ));
    }
    let n = resolution;
    let concurrence = ["c", "c1", "c2", "visibility"];
    let statistics = ["g2", "c", "c1", "c2", "n_a", "n_b"];
    match id {
        FigureId::Fig2 => {
            // odd count so that γd = 0 is a grid point
            let (lo, hi) = ranges.first.unwrap_or((-1.0, 1.0));
            let base = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0)?;
            let axis = Axis::linear(AxisName::Param(ParamName::GammaD), lo, hi, n | 1)?;
            SweepSpec::new(base, vec![axis])?.with_outputs(&["visibility", "c", "c1", "c2"])
        }
        FigureId::Fig3a => coupling_plane(0.01, 0.01, 0.0, n, ranges, &concurrence),
        FigureId::Fig3b => coupling_plane(0.1, 0.01, 0.0, n, ranges, &concurrence),
        FigureId::Fig3c => coupling_plane(0.2, 0.01, 0.0, n, ranges, &concurrence),
        FigureId::Fig4a => coupling_plane(0.2, 0.01, 0.0, n, ranges, &concurrence),
        FigureId::Fig4b => coupling_plane(0.2, 0.01, 0.5 * (0.2f64 * 0.01).sqrt(), n, ranges, &concurrence),
        FigureId::Fig4c => coupling_plane(0.2, 0.01, (0.2f64 * 0.01).sqrt(), n, ranges, &concurrence),
        FigureId::Fig5 => {
            let (e0, e1) = ranges.first.unwrap_or((0.0, 2.0));
            let (p0, p1) = ranges.second.unwrap_or((0.0, 1.0));
            let base = SystemParams::new(1.0, 0.1, 0.0, 0.01, 0.01, 0.01)?;
            SweepSpec::new(
                base,
                vec![
                    Axis::linear(AxisName::Param(ParamName::Epsilon), e0, e1, n)?,
                    Axis::linear(AxisName::Pdd0, p0, p1, n)?,
                ],
            )?
            .with_outputs(&concurrence)
        }
        FigureId::Fig6a => coupling_plane(0.01, 0.01, 0.0, n, ranges, &statistics),
        FigureId::Fig6b => coupling_plane(0.1, 0.01, 0.0, n, ranges, &statistics),
        FigureId::Fig6c => coupling_plane(0.2, 0.01, 0.0, n, ranges, &statistics),
    }
}

pub fn figure_dataset(id: FigureId, resolution: usize) -> Result<SweepTable> {
    run_sweep(&figure_spec(id, resolution, FigureRanges::default())?)
}

/// Labels connected components (4-neighbour) of the cells where `mask` holds
/// on a `rows × cols` grid stored row-major. Returns the component count.
pub fn count_regions(mask: &[bool], rows: usize, cols: usize) -> usize {
    assert_eq!(mask.len(), rows * cols);
    let mut seen = vec![false; mask.len()];
    let mut regions = 0;
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        regions += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (r, c) = (k / cols, k % cols);
            let mut visit = |rr: usize, cc: usize| {
                let j = rr * cols + cc;
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if r > 0 {
                visit(r - 1, c);
            }
            if r + 1 < rows {
                visit(r + 1, c);
            }
            if c > 0 {
                visit(r, c - 1);
            }
            if c + 1 < cols {
                visit(r, c + 1);
            }
        }
    }
    regions
}

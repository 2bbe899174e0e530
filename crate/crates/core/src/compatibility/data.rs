//! Right-hand-side tuples `(f, g_1, …, g_m, h_0, …, h_{κ−1})`.

use crate::error::{Error, Result};
use crate::spectral::io::{fields_from_csv, fields_to_csv, read_field, write_field};
use crate::spectral::{FrequencyGrid, SpectralField};
use crate::symbol::BoundarySide;
use crate::weights::WeightParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A function of `(x, t)` given by its time jets at `t = 0` and, optionally,
/// a space-time surrogate (last axis time) used for norms.
#[derive(Debug, Clone, PartialEq)]
pub struct JetField {
    /// `jets[q] = ∂_t^q F(·, 0)`.
    pub jets: Vec<SpectralField>,
    pub space_time: Option<SpectralField>,
}

impl JetField {
    pub fn from_jets(jets: Vec<SpectralField>) -> Self {
        Self { jets, space_time: None }
    }

    pub fn zeros(grid: &FrequencyGrid, depth: usize) -> Self {
        Self::from_jets(vec![SpectralField::zeros(grid); depth + 1])
    }

    /// Jets read off a space-time trigonometric polynomial by exact differentiation in `t`.
    pub fn from_space_time(st: SpectralField, depth: usize) -> Result<Self> {
        if !st.grid.has_time_axis() {
            return Err(Error::GridMismatch("space-time field needs a time axis".into()));
        }
        let t_axis = st.grid.dim() - 1;
        let jets = (0..=depth).map(|q| st.partial(t_axis, q as u32).restrict(t_axis, 0.0)).collect::<Result<Vec<_>>>()?;
        Ok(Self { jets, space_time: Some(st) })
    }

    pub fn depth(&self) -> usize {
        self.jets.len().saturating_sub(1)
    }

    pub fn jet(&self, q: usize) -> Result<&SpectralField> {
        self.jets.get(q).ok_or_else(|| Error::Parameter(format!("time jet {q} requested, depth is {}", self.depth())))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = self.jets.iter().zip(&other.jets).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
        if let (Some(a), Some(b)) = (&self.space_time, &other.space_time) {
            d = d.max(a.max_abs_diff(b));
        }
        d
    }
}

/// Data of one boundary operator on both boundary components.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub lower: JetField,
    pub upper: JetField,
}

impl BoundaryData {
    pub fn side(&self, side: BoundarySide) -> &JetField {
        match side {
            BoundarySide::Lower => &self.lower,
            BoundarySide::Upper => &self.upper,
        }
    }

    pub fn side_mut(&mut self, side: BoundarySide) -> &mut JetField {
        match side {
            BoundarySide::Lower => &mut self.lower,
            BoundarySide::Upper => &mut self.upper,
        }
    }
}

/// Initial data `h_k = ∂_t^k u|_{t=0}`, `k < κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub h: Vec<SpectralField>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTuple {
    pub f: JetField,
    pub g: Vec<BoundaryData>,
    pub h: CauchyData,
    /// Regularity `(s, φ)` of the solution space the data belongs to.
    pub weight: WeightParams,
}

impl DataTuple {
    pub fn component_count(&self) -> usize {
        1 + self.g.len() + self.h.h.len()
    }

    pub fn check_finite(&self) -> Result<()> {
        let all = self
            .f
            .jets
            .iter()
            .chain(self.f.space_time.iter())
            .chain(self.g.iter().flat_map(|g| [&g.lower, &g.upper]).flat_map(|j| j.jets.iter().chain(j.space_time.iter())))
            .chain(self.h.h.iter());
        for f in all {
            f.check_finite()?;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = self.f.max_abs_diff(&other.f);
        for (a, b) in self.g.iter().zip(&other.g) {
            d = d.max(a.lower.max_abs_diff(&b.lower)).max(a.upper.max_abs_diff(&b.upper));
        }
        for (a, b) in self.h.h.iter().zip(&other.h.h) {
            d = d.max(a.max_abs_diff(b));
        }
        d
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    weight: WeightParams,
    boundary_count: usize,
    f: JetEntry,
    g: Vec<[JetEntry; 2]>,
    h_count: usize,
}

#[derive(Serialize, Deserialize)]
struct JetEntry {
    stem: String,
    depth: usize,
    space_time: bool,
}

fn write_list(stem: &Path, fields: &[SpectralField]) -> Result<()> {
    let grid = &fields.first().ok_or_else(|| Error::Input("empty field list".into()))?.grid;
    std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(grid)?)?;
    std::fs::write(stem.with_extension("csv"), fields_to_csv(fields)?)?;
    Ok(())
}

fn read_list(stem: &Path, count: usize) -> Result<Vec<SpectralField>> {
    let grid: FrequencyGrid = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
    let mut out = fields_from_csv(&grid, &std::fs::read_to_string(stem.with_extension("csv"))?)?;
    if out.len() > count {
        return Err(Error::Input(format!("{} holds {} fields, expected {count}", stem.display(), out.len())));
    }
    out.resize(count, SpectralField::zeros(&grid));
    Ok(out)
}

fn write_jet(dir: &Path, name: &str, j: &JetField) -> Result<JetEntry> {
    write_list(&dir.join(format!("{name}_jets")), &j.jets)?;
    if let Some(st) = &j.space_time {
        write_field(&dir.join(format!("{name}_st")), st)?;
    }
    Ok(JetEntry { stem: name.to_string(), depth: j.depth(), space_time: j.space_time.is_some() })
}

fn read_jet(dir: &Path, e: &JetEntry) -> Result<JetField> {
    let jets = read_list(&dir.join(format!("{}_jets", e.stem)), e.depth + 1)?;
    let space_time = if e.space_time { Some(read_field(&dir.join(format!("{}_st", e.stem)))?) } else { None };
    Ok(JetField { jets, space_time })
}

/// Writes `data.json` plus one JSON/CSV pair per component into `dir`.
pub fn write_data(dir: &Path, d: &DataTuple) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let f = write_jet(dir, "f", &d.f)?;
    let mut g = Vec::new();
    for (j, b) in d.g.iter().enumerate() {
        g.push([write_jet(dir, &format!("g{j}_lower"), &b.lower)?, write_jet(dir, &format!("g{j}_upper"), &b.upper)?]);
    }
    if !d.h.h.is_empty() {
        write_list(&dir.join("h"), &d.h.h)?;
    }
    let manifest = Manifest { weight: d.weight.clone(), boundary_count: d.g.len(), f, g, h_count: d.h.h.len() };
    std::fs::write(dir.join("data.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

pub fn read_data(dir: &Path) -> Result<DataTuple> {
    let m: Manifest = serde_json::from_str(&std::fs::read_to_string(dir.join("data.json"))?)?;
    if m.g.len() != m.boundary_count {
        return Err(Error::Input("boundary entries do not match boundary_count".into()));
    }
    let f = read_jet(dir, &m.f)?;
    let g = m
        .g
        .iter()
        .map(|[lo, up]| Ok(BoundaryData { lower: read_jet(dir, lo)?, upper: read_jet(dir, up)? }))
        .collect::<Result<Vec<_>>>()?;
    let h = if m.h_count > 0 { read_list(&dir.join("h"), m.h_count)? } else { Vec::new() };
    Ok(DataTuple { f, g, h: CauchyData { h }, weight: m.weight })
}

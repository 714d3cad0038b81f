use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, DEFAULT_RANK_TOL};

/// Which bases are built from interpolation data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "v")]
    VOnly,
    #[serde(rename = "w")]
    WOnly,
    #[serde(rename = "two")]
    TwoSided,
    #[serde(rename = "w=v")]
    OneSidedWEqualsV,
}

impl Side {
    pub fn uses_v(self) -> bool {
        !matches!(self, Side::WOnly)
    }

    pub fn uses_w(self) -> bool {
        matches!(self, Side::WOnly | Side::TwoSided)
    }
}

/// One point tuple with per-point derivative orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTuple {
    pub points: Vec<C64>,
    #[serde(default)]
    pub orders: Vec<usize>,
}

impl PointTuple {
    pub fn new(points: Vec<C64>) -> Self {
        let orders = vec![0; points.len()];
        PointTuple { points, orders }
    }

    pub fn with_orders(points: Vec<C64>, orders: Vec<usize>) -> Self {
        PointTuple { points, orders }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Orders, with an empty list read as all zeros.
    pub fn orders_or_zero(&self) -> Vec<usize> {
        if self.orders.is_empty() {
            vec![0; self.points.len()]
        } else {
            self.orders.clone()
        }
    }

    fn normalized(&self) -> Self {
        PointTuple { points: self.points.clone(), orders: self.orders_or_zero() }
    }

    fn validate(&self, label: &str) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidSpec(format!("{label} has no points")));
        }
        if !self.orders.is_empty() && self.orders.len() != self.points.len() {
            return Err(Error::InvalidSpec(format!(
                "{label} has {} points but {} orders",
                self.points.len(),
                self.orders.len()
            )));
        }
        if self.points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSpec(format!("{label} has non-finite points")));
        }
        Ok(())
    }
}

fn default_tol() -> f64 {
    DEFAULT_RANK_TOL
}

/// Interpolation data for basis construction.
///
/// `v_points`/`v_orders` (and the `w_` pair) describe one point tuple;
/// `v_tuples`/`w_tuples` list further tuples whose blocks are concatenated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSpec {
    #[serde(default)]
    pub v_points: Vec<C64>,
    #[serde(default)]
    pub v_orders: Vec<usize>,
    #[serde(default)]
    pub w_points: Vec<C64>,
    #[serde(default)]
    pub w_orders: Vec<usize>,
    pub side: Side,
    #[serde(default)]
    pub realify: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v_tuples: Vec<PointTuple>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w_tuples: Vec<PointTuple>,
}

impl InterpolationSpec {
    pub fn new(side: Side) -> Self {
        InterpolationSpec {
            v_points: Vec::new(),
            v_orders: Vec::new(),
            w_points: Vec::new(),
            w_orders: Vec::new(),
            side,
            realify: false,
            tol: DEFAULT_RANK_TOL,
            v_tuples: Vec::new(),
            w_tuples: Vec::new(),
        }
    }

    /// Single V tuple with zero orders.
    pub fn v(side: Side, points: Vec<C64>) -> Self {
        Self::new(side).with_v(PointTuple::new(points))
    }

    pub fn with_v(mut self, tuple: PointTuple) -> Self {
        if self.v_points.is_empty() && self.v_tuples.is_empty() {
            self.v_points = tuple.points;
            self.v_orders = tuple.orders;
        } else {
            self.v_tuples.push(tuple);
        }
        self
    }

    pub fn with_w(mut self, tuple: PointTuple) -> Self {
        if self.w_points.is_empty() && self.w_tuples.is_empty() {
            self.w_points = tuple.points;
            self.w_orders = tuple.orders;
        } else {
            self.w_tuples.push(tuple);
        }
        self
    }

    pub fn with_realify(mut self, realify: bool) -> Self {
        self.realify = realify;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// All V tuples in order, orders filled in. Empty unless the side uses V.
    pub fn v_tuple_list(&self) -> Vec<PointTuple> {
        if !self.side.uses_v() {
            return Vec::new();
        }
        collect(&self.v_points, &self.v_orders, &self.v_tuples)
    }

    /// All W tuples in order. Empty unless the side builds W from data.
    pub fn w_tuple_list(&self) -> Vec<PointTuple> {
        if !self.side.uses_w() {
            return Vec::new();
        }
        collect(&self.w_points, &self.w_orders, &self.w_tuples)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidSpec(format!("tol must be finite and >= 0, got {}", self.tol)));
        }
        let check = |points: &[C64], orders: &[usize], extra: &[PointTuple], tag: &str| {
            if !points.is_empty() || !orders.is_empty() {
                PointTuple { points: points.to_vec(), orders: orders.to_vec() }
                    .validate(&format!("{tag}_points"))?;
            }
            for (i, t) in extra.iter().enumerate() {
                t.validate(&format!("{tag}_tuples[{i}]"))?;
            }
            Ok::<(), Error>(())
        };
        check(&self.v_points, &self.v_orders, &self.v_tuples, "v")?;
        check(&self.w_points, &self.w_orders, &self.w_tuples, "w")?;
        let v = collect(&self.v_points, &self.v_orders, &self.v_tuples);
        let w = collect(&self.w_points, &self.w_orders, &self.w_tuples);
        if self.side.uses_v() && v.is_empty() {
            return Err(Error::InvalidSpec("side uses V but no V points were given".into()));
        }
        if self.side.uses_w() && w.is_empty() {
            return Err(Error::InvalidSpec("side uses W but no W points were given".into()));
        }
        if !self.side.uses_v() && !v.is_empty() {
            return Err(Error::InvalidSpec("V points given for a W-only spec".into()));
        }
        if !self.side.uses_w() && !w.is_empty() {
            return Err(Error::InvalidSpec("W points given for a spec that does not build W".into()));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

fn collect(points: &[C64], orders: &[usize], extra: &[PointTuple]) -> Vec<PointTuple> {
    let mut out = Vec::new();
    if !points.is_empty() {
        out.push(PointTuple { points: points.to_vec(), orders: orders.to_vec() }.normalized());
    }
    out.extend(extra.iter().map(PointTuple::normalized));
    out
}

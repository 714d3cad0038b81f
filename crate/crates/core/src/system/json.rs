//! JSON import/export of closed-form systems.
//!
//! Matrices are nested row arrays. A real matrix is written with plain
//! numbers; a matrix with any nonzero imaginary part is written with
//! `[re, im]` pairs. Either entry form is accepted on input.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    FirstOrderMatrices, SecondOrderMatrices, StructuredBilinearSystem, SystemData, Template,
    TimeDelayMatrices,
};
use crate::error::{Error, Result};
use crate::linalg::{is_real, CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<Entry>>);

impl MatrixJson {
    pub fn from_cmat(mat: &CMat) -> Self {
        let real = is_real(mat);
        let rows = (0..mat.nrows())
            .map(|i| {
                (0..mat.ncols())
                    .map(|j| {
                        let z = mat[(i, j)];
                        if real {
                            Entry::Real(z.re)
                        } else {
                            Entry::Complex([z.re, z.im])
                        }
                    })
                    .collect()
            })
            .collect();
        MatrixJson(rows)
    }

    /// Converts to a matrix, checking the shape against `(rows, cols)`.
    pub fn to_cmat(&self, name: &str, rows: usize, cols: usize) -> Result<CMat> {
        if self.0.len() != rows || self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidSystem(format!(
                "matrix {name} must be {rows}x{cols}"
            )));
        }
        Ok(CMat::from_fn(rows, cols, |i, j| match self.0[i][j] {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }))
    }

    /// Converts without a known shape.
    pub fn to_cmat_any(&self, name: &str) -> Result<CMat> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        self.to_cmat(name, rows, cols)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub template: Template,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e: Option<MatrixJson>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixJson>,
    #[serde(rename = "Ad", default, skip_serializing_if = "Option::is_none")]
    pub ad: Option<MatrixJson>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<MatrixJson>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<MatrixJson>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub stiffness: Option<MatrixJson>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub bilinear: Option<Vec<MatrixJson>>,
    #[serde(rename = "Np", default, skip_serializing_if = "Option::is_none")]
    pub np: Option<Vec<MatrixJson>>,
    #[serde(rename = "Nv", default, skip_serializing_if = "Option::is_none")]
    pub nv: Option<Vec<MatrixJson>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixJson>,
    #[serde(rename = "Bu", default, skip_serializing_if = "Option::is_none")]
    pub bu: Option<MatrixJson>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<MatrixJson>,
    #[serde(rename = "Cp", default, skip_serializing_if = "Option::is_none")]
    pub cp: Option<MatrixJson>,
    #[serde(rename = "Cv", default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<MatrixJson>,
}

fn required<'a, T>(field: &'a Option<T>, name: &str, template: Template) -> Result<&'a T> {
    field
        .as_ref()
        .ok_or_else(|| Error::InvalidSystem(format!("{template} system needs field \"{name}\"")))
}

fn list(mats: &[CMat]) -> Vec<MatrixJson> {
    mats.iter().map(MatrixJson::from_cmat).collect()
}

impl SystemFile {
    fn empty(template: Template, n: usize, m: usize, p: usize) -> Self {
        SystemFile {
            template,
            n,
            m,
            p,
            tau: None,
            e: None,
            a: None,
            ad: None,
            mass: None,
            damping: None,
            stiffness: None,
            bilinear: None,
            np: None,
            nv: None,
            b: None,
            bu: None,
            c: None,
            cp: None,
            cv: None,
        }
    }

    pub fn from_system(sys: &StructuredBilinearSystem) -> Result<Self> {
        let mut f = Self::empty(sys.template(), sys.n(), sys.m(), sys.p());
        match sys.data() {
            SystemData::FirstOrder(x) => {
                f.e = Some(MatrixJson::from_cmat(&x.e));
                f.a = Some(MatrixJson::from_cmat(&x.a));
                f.bilinear = Some(list(&x.n));
                f.b = Some(MatrixJson::from_cmat(&x.b));
                f.c = Some(MatrixJson::from_cmat(&x.c));
            }
            SystemData::SecondOrder(x) => {
                f.mass = Some(MatrixJson::from_cmat(&x.m));
                f.damping = Some(MatrixJson::from_cmat(&x.d));
                f.stiffness = Some(MatrixJson::from_cmat(&x.k));
                f.np = Some(list(&x.np));
                f.nv = Some(list(&x.nv));
                f.bu = Some(MatrixJson::from_cmat(&x.bu));
                f.cp = Some(MatrixJson::from_cmat(&x.cp));
                f.cv = Some(MatrixJson::from_cmat(&x.cv));
            }
            SystemData::TimeDelay(x) => {
                f.tau = Some(x.tau);
                f.e = Some(MatrixJson::from_cmat(&x.e));
                f.a = Some(MatrixJson::from_cmat(&x.a));
                f.ad = Some(MatrixJson::from_cmat(&x.ad));
                f.bilinear = Some(list(&x.n));
                f.b = Some(MatrixJson::from_cmat(&x.b));
                f.c = Some(MatrixJson::from_cmat(&x.c));
            }
            SystemData::Generic(_) => {
                return Err(Error::Unsupported("Generic systems cannot be serialized".into()));
            }
        }
        Ok(f)
    }

    pub fn to_system(&self) -> Result<StructuredBilinearSystem> {
        let (n, m, p, t) = (self.n, self.m, self.p, self.template);
        let sq = |field: &Option<MatrixJson>, name: &str| -> Result<CMat> {
            required(field, name, t)?.to_cmat(name, n, n)
        };
        let sq_list = |field: &Option<Vec<MatrixJson>>, name: &str| -> Result<Vec<CMat>> {
            let mats = required(field, name, t)?;
            if mats.len() != m {
                return Err(Error::InvalidSystem(format!(
                    "\"{name}\" holds {} matrices, expected m = {m}",
                    mats.len()
                )));
            }
            mats.iter()
                .enumerate()
                .map(|(j, x)| x.to_cmat(&format!("{name}[{j}]"), n, n))
                .collect()
        };
        let input = |field: &Option<MatrixJson>, name: &str| -> Result<CMat> {
            required(field, name, t)?.to_cmat(name, n, m)
        };
        let output = |field: &Option<MatrixJson>, name: &str| -> Result<CMat> {
            required(field, name, t)?.to_cmat(name, p, n)
        };
        match t {
            Template::FirstOrder => StructuredBilinearSystem::first_order(FirstOrderMatrices {
                e: sq(&self.e, "E")?,
                a: sq(&self.a, "A")?,
                n: sq_list(&self.bilinear, "N")?,
                b: input(&self.b, "B")?,
                c: output(&self.c, "C")?,
            }),
            Template::SecondOrder => StructuredBilinearSystem::second_order(SecondOrderMatrices {
                m: sq(&self.mass, "M")?,
                d: sq(&self.damping, "D")?,
                k: sq(&self.stiffness, "K")?,
                np: sq_list(&self.np, "Np")?,
                nv: sq_list(&self.nv, "Nv")?,
                bu: input(&self.bu, "Bu")?,
                cp: output(&self.cp, "Cp")?,
                cv: output(&self.cv, "Cv")?,
            }),
            Template::TimeDelay => StructuredBilinearSystem::time_delay(TimeDelayMatrices {
                e: sq(&self.e, "E")?,
                a: sq(&self.a, "A")?,
                ad: sq(&self.ad, "Ad")?,
                tau: *required(&self.tau, "tau", t)?,
                n: sq_list(&self.bilinear, "N")?,
                b: input(&self.b, "B")?,
                c: output(&self.c, "C")?,
            }),
            Template::Generic => Err(Error::InvalidSystem(
                "Generic systems cannot be read from JSON".into(),
            )),
        }
    }
}

impl StructuredBilinearSystem {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SystemFile::from_system(self)?)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str::<SystemFile>(text)?.to_system()
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

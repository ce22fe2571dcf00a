use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};
use crate::linalg::{self, QMat};

/// A nonzero vector `v_x` of `V⁽¹⁾ ⊗ … ⊗ V⁽ⁿ⁾`, stored sparsely with
/// 0-based index tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorPoint {
    shape: Vec<usize>,
    coords: BTreeMap<Vec<usize>, Rational>,
}

impl TensorPoint {
    pub fn new(shape: Vec<usize>, coords: BTreeMap<Vec<usize>, Rational>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::invalid("shape must be a nonempty list of positive ranks"));
        }
        for idx in coords.keys() {
            if idx.len() != shape.len() || idx.iter().zip(&shape).any(|(j, r)| j >= r) {
                return Err(Error::dims(format!("index {idx:?} outside shape {shape:?}")));
            }
        }
        let coords: BTreeMap<_, _> = coords.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        if coords.is_empty() {
            return Err(Error::invalid("the zero vector does not define a point"));
        }
        Ok(TensorPoint { shape, coords })
    }

    /// From row-major dense coordinates.
    pub fn from_dense(shape: Vec<usize>, values: &[Rational]) -> Result<Self> {
        let total: usize = shape.iter().product();
        if values.len() != total {
            return Err(Error::dims(format!("{} values for shape {shape:?}", values.len())));
        }
        let coords = values
            .iter()
            .enumerate()
            .map(|(k, q)| (unflatten(&shape, k), q.clone()))
            .collect();
        Self::new(shape, coords)
    }

    /// `e_{j_1} ⊗ … ⊗ e_{j_n}` with 0-based indices.
    pub fn basis_vector(shape: Vec<usize>, index: Vec<usize>) -> Result<Self> {
        Self::new(shape, BTreeMap::from([(index, Rational::from_integer(1.into()))]))
    }

    /// `u⁽¹⁾ ⊗ … ⊗ u⁽ⁿ⁾`.
    pub fn pure(factors: &[Vec<Rational>]) -> Result<Self> {
        let shape: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut dense = vec![Rational::from_integer(1.into())];
        for f in factors {
            dense = crate::filtration::kron_vec(&dense, f);
        }
        Self::from_dense(shape, &dense)
    }

    /// `Σ_j e_j ⊗ e_j` in `ℚ^r ⊗ ℚ^r`.
    pub fn identity(r: usize) -> Self {
        let one = Rational::from_integer(1.into());
        let coords = (0..r).map(|j| (vec![j, j], one.clone())).collect();
        Self::new(vec![r, r], coords).expect("nonzero")
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.shape.len()
    }

    pub fn coords(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.coords
    }

    pub fn support(&self) -> Vec<Vec<usize>> {
        self.coords.keys().cloned().collect()
    }

    pub fn dense(&self) -> Vec<Rational> {
        let total: usize = self.shape.iter().product();
        let mut out = vec![Rational::zero(); total];
        for (idx, q) in &self.coords {
            out[flatten(&self.shape, idx)] = q.clone();
        }
        out
    }

    /// Applies `m` (rows indexed by the new coordinate) along mode `i`.
    pub fn apply_mode(&self, i: usize, m: &[Vec<Rational>]) -> Result<TensorPoint> {
        if m.iter().any(|row| row.len() != self.shape[i]) {
            return Err(Error::dims(format!("mode {i} map has the wrong width")));
        }
        let mut shape = self.shape.clone();
        shape[i] = m.len();
        let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (idx, q) in &self.coords {
            for (k, row) in m.iter().enumerate() {
                let a = &row[idx[i]];
                if a.is_zero() {
                    continue;
                }
                let mut j = idx.clone();
                j[i] = k;
                *out.entry(j).or_insert_with(Rational::zero) += a * q;
            }
        }
        TensorPoint::new(shape, out)
    }

    /// Coordinates of `v_x` in the product of the given bases; `bases[i]`
    /// lists the basis vectors of `V⁽ⁱ⁾`.
    pub fn in_bases(&self, bases: &[QMat]) -> Result<TensorPoint> {
        if bases.len() != self.arity() {
            return Err(Error::dims("one basis per tensor factor is required"));
        }
        let mut out = self.clone();
        for (i, b) in bases.iter().enumerate() {
            if b.len() != self.shape[i] || b.iter().any(|v| v.len() != self.shape[i]) {
                return Err(Error::dims(format!("basis {i} does not match rank {}", self.shape[i])));
            }
            let m = linalg::inverse(&linalg::transpose(b))?;
            out = out.apply_mode(i, &m)?;
        }
        Ok(out)
    }

    /// The `r_i × Π_{k≠i} r_k` flattening along mode `i`; its columns are the
    /// mode-`i` fibers.
    pub fn matricization(&self, i: usize) -> QMat {
        let mut rest = self.shape.clone();
        rest.remove(i);
        let width: usize = rest.iter().product();
        let mut m = linalg::zeros(self.shape[i], width);
        for (idx, q) in &self.coords {
            let mut other = idx.clone();
            other.remove(i);
            m[idx[i]][flatten(&rest, &other)] = q.clone();
        }
        m
    }
}

pub(crate) fn flatten(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (j, r)| acc * r + j)
}

pub(crate) fn unflatten(shape: &[usize], mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, r) in idx.iter_mut().zip(shape).rev() {
        *slot = k % r;
        k /= r;
    }
    idx
}

pub(crate) fn index_key(idx: &[usize]) -> String {
    idx.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn parse_index_key(key: &str) -> Result<Vec<usize>> {
    key.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j - 1),
            _ => Err(Error::invalid(format!("bad 1-based index tuple {key:?}"))),
        })
        .collect()
}

#[derive(Deserialize)]
struct PointJson {
    shape: Vec<usize>,
    coords: BTreeMap<String, String>,
}

impl Serialize for TensorPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Keys are emitted in index order rather than string order.
        use serde::ser::SerializeMap;
        struct Coords<'a>(&'a BTreeMap<Vec<usize>, Rational>);
        impl Serialize for Coords<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(&index_key(k), &format_rational(v))?;
                }
                m.end()
            }
        }
        #[derive(Serialize)]
        struct Out<'a> {
            shape: &'a [usize],
            coords: Coords<'a>,
        }
        Out {
            shape: &self.shape,
            coords: Coords(&self.coords),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PointJson::deserialize(d)?;
        let mut coords = BTreeMap::new();
        for (k, v) in j.coords {
            let idx = parse_index_key(&k).map_err(D::Error::custom)?;
            let q = parse_rational(&v).map_err(D::Error::custom)?;
            coords.insert(idx, q);
        }
        TensorPoint::new(j.shape, coords).map_err(D::Error::custom)
    }
}

/// Serializes lists of 0-based index tuples as 1-based `"j1,…,jn"` strings.
pub(crate) mod serde_index_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<usize>], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|idx| index_key(idx)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<usize>>, D::Error> {
        use serde::de::Error as _;
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|k| parse_index_key(k).map_err(D::Error::custom))
            .collect()
    }
}

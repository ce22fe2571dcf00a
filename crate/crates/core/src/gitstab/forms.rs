//! Linear forms behind the destabilization functional in a fixed basis.
//!
//! Coordinates of a filtration tuple compatible with a fixed basis form a
//! vector `y = (y⁽ⁱ⁾_a)`. Mode `i` is cut into consecutive blocks of sizes
//! `r_ij`, and every support tuple `s` of the point gives the form
//! `l_s(y) = Σ κ_ij mean(y⁽ⁱʲ⁾) − ν Σ_i y⁽ⁱ⁾_{s_i}`. The plain functional
//! uses one block per mode with `κ = ν = 1`; the graded one of a reduced
//! instance uses `κ_ij = b_ij r_ij` and `ν = N`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rat, Rational};
use crate::gitstab::AlgValue;
use crate::linalg;

#[derive(Debug, Clone)]
pub(crate) struct FormLayout {
    kappa: Vec<Vec<Rational>>,
    nu: Rational,
    offsets: Vec<usize>,
    /// `(block index, block size)` for every coordinate of every mode.
    block_of: Vec<Vec<(usize, usize)>>,
    weights: Vec<Rational>,
}

impl FormLayout {
    pub fn plain(shape: &[usize]) -> Self {
        let blocks: Vec<Vec<usize>> = shape.iter().map(|&r| vec![r]).collect();
        let kappa = shape.iter().map(|_| vec![Rational::one()]).collect();
        Self::graded(&blocks, kappa, Rational::one())
    }

    pub fn graded(block_dims: &[Vec<usize>], kappa: Vec<Vec<Rational>>, nu: Rational) -> Self {
        let mut offsets = Vec::new();
        let mut block_of = Vec::new();
        let mut weights = Vec::new();
        let mut at = 0;
        for dims in block_dims {
            offsets.push(at);
            let mut per = Vec::new();
            for (j, &d) in dims.iter().enumerate() {
                for _ in 0..d {
                    per.push((j, d));
                    weights.push(Rational::new(1.into(), (d as i64).into()));
                }
            }
            at += per.len();
            block_of.push(per);
        }
        FormLayout {
            kappa,
            nu,
            offsets,
            block_of,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn modes(&self) -> usize {
        self.offsets.len()
    }

    pub fn mode_len(&self, i: usize) -> usize {
        self.block_of[i].len()
    }

    /// The gradient of `l_s` for the inner product `Σ w y z`.
    pub fn gradient(&self, s: &[usize]) -> Vec<Rational> {
        let mut g = Vec::with_capacity(self.len());
        for (i, per) in self.block_of.iter().enumerate() {
            for (a, &(j, d)) in per.iter().enumerate() {
                let mut v = self.kappa[i][j].clone();
                if a == s[i] {
                    v -= &self.nu * rat(d as i64);
                }
                g.push(v);
            }
        }
        g
    }

    pub fn inner(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for ((x, y), w) in a.iter().zip(b).zip(&self.weights) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y * w;
            }
        }
        acc
    }

    pub fn norm_sq(&self, y: &[Rational]) -> Rational {
        self.inner(y, y)
    }

    /// `max_s l_s(y)` over the support.
    pub fn numerator(&self, y: &[Rational], support: &[Vec<usize>]) -> Rational {
        let mut mean_part = Rational::zero();
        for (i, per) in self.block_of.iter().enumerate() {
            for (a, &(j, d)) in per.iter().enumerate() {
                mean_part += &self.kappa[i][j] * &y[self.offsets[i] + a] / rat(d as i64);
            }
        }
        let min = support
            .iter()
            .map(|s| {
                s.iter()
                    .enumerate()
                    .map(|(i, &a)| y[self.offsets[i] + a].clone())
                    .sum::<Rational>()
            })
            .min()
            .expect("nonempty support");
        mean_part - &self.nu * min
    }

    pub fn split(&self, y: &[Rational]) -> Vec<Vec<Rational>> {
        (0..self.modes())
            .map(|i| y[self.offsets[i]..self.offsets[i] + self.mode_len(i)].to_vec())
            .collect()
    }
}

/// The point of minimal norm in the convex hull of `gens`, with the indices
/// of the generators carrying positive weight.
pub(crate) fn min_norm_point(gens: &[Vec<Rational>], layout: &FormLayout) -> Result<(Vec<Rational>, Vec<usize>)> {
    if gens.is_empty() {
        return Err(Error::invalid("empty support"));
    }
    let combine = |set: &[usize], coef: &[Rational]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); layout.len()];
        for (&k, c) in set.iter().zip(coef) {
            if c.is_zero() {
                continue;
            }
            for (xi, gi) in x.iter_mut().zip(&gens[k]) {
                *xi += c * gi;
            }
        }
        x
    };
    let start = (0..gens.len())
        .min_by(|&a, &b| layout.norm_sq(&gens[a]).cmp(&layout.norm_sq(&gens[b])))
        .expect("nonempty");
    let mut set = vec![start];
    let mut weights = vec![Rational::one()];
    let mut x = gens[start].clone();
    // Wolfe's method terminates after finitely many affine steps; the cap
    // only guards against a bug turning into a hang.
    for _ in 0..100_000 {
        let xx = layout.norm_sq(&x);
        if xx.is_zero() {
            return Ok((x, set));
        }
        let (j, best) = (0..gens.len())
            .map(|k| (k, layout.inner(&gens[k], &x)))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty");
        if best >= xx {
            return Ok((x, set));
        }
        if set.contains(&j) {
            return Err(Error::Internal("min-norm point search revisited a generator".into()));
        }
        set.push(j);
        weights.push(Rational::zero());
        loop {
            let alpha = affine_minimizer(gens, &set, layout)?;
            if alpha.iter().all(Signed::is_positive) {
                weights = alpha;
                x = combine(&set, &weights);
                break;
            }
            let theta = set
                .iter()
                .enumerate()
                .filter(|(k, _)| !alpha[*k].is_positive())
                .map(|(k, _)| &weights[k] / (&weights[k] - &alpha[k]))
                .min()
                .expect("some coefficient is not positive");
            let one_minus = Rational::one() - &theta;
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = &*w * &one_minus + &theta * a;
            }
            let keep: Vec<usize> = (0..set.len()).filter(|&k| weights[k].is_positive()).collect();
            set = keep.iter().map(|&k| set[k]).collect();
            weights = keep.iter().map(|&k| weights[k].clone()).collect();
            x = combine(&set, &weights);
            if set.len() <= 1 {
                break;
            }
        }
    }
    Err(Error::Internal("min-norm point search did not terminate".into()))
}

/// Affine weights of the point of minimal norm in the affine hull of the
/// selected generators.
fn affine_minimizer(gens: &[Vec<Rational>], set: &[usize], layout: &FormLayout) -> Result<Vec<Rational>> {
    let k = set.len();
    let mut m = linalg::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let v = layout.inner(&gens[set[a]], &gens[set[b]]);
            m[a][b] = v.clone();
            m[b][a] = v;
        }
        m[a][k] = Rational::one();
        m[k][a] = Rational::one();
    }
    let inv = linalg::inverse(&m)
        .map_err(|_| Error::Internal("affinely dependent generators in min-norm search".into()))?;
    Ok((0..k).map(|a| inv[a][k].clone()).collect())
}

/// Smallest value of `max_s l_s(y) / ‖y‖` over integer `y` with entries in
/// `[-bound, bound]`; zero when nothing is negative.
pub(crate) fn grid_minimum(layout: &FormLayout, support: &[Vec<usize>], bound: i64) -> AlgValue {
    let n = layout.len();
    let mut y = vec![-bound; n];
    let mut best = AlgValue::zero();
    loop {
        let q: Vec<Rational> = y.iter().map(|&v| rat(v)).collect();
        let den = layout.norm_sq(&q);
        if den.is_positive() {
            let num = layout.numerator(&q, support);
            if num.is_negative() {
                let v = AlgValue::ratio(&num, &den);
                if v < best {
                    best = v;
                }
            }
        }
        let mut k = 0;
        while k < n && y[k] == bound {
            y[k] = -bound;
            k += 1;
        }
        if k == n {
            return best;
        }
        y[k] += 1;
    }
}

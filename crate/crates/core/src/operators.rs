//! Linear operators, multilinear operators and homogeneous polynomials
//! between finite-dimensional l_q spaces, stored as dense coefficient
//! tensors with the codomain index outermost.
//!
//! A polynomial's tensor is symmetric in its domain slots by construction,
//! bitwise: symmetrization averages each index orbit once (over the sorted
//! representative) and writes the same value to every member, so permuting
//! indices never changes the stored float.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Functional, NormedSpace, Vector};
use crate::tensor::{increment, offset, permutations, Tensor};

/// C(n, k) as f64; n stays below ~60 here so this is exact.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..k {
        num *= (n - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Nondecreasing multi-indices of length `n` with entries in 0..d, in
/// lexicographic order. These are the canonical orbit representatives for
/// symmetric tensors.
fn sorted_multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.clone());
        // Advance to the next nondecreasing index.
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < d {
                let v = idx[k] + 1;
                for slot in idx.iter_mut().skip(k) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Write `value` into every permutation of `idx` in the domain part of a
/// symmetric tensor slice (codomain index fixed at `f`).
fn write_orbit(t: &mut Tensor, f: usize, idx: &[usize], value: f64) {
    let n = idx.len();
    let mut full = Vec::with_capacity(n + 1);
    for perm in permutations(n) {
        full.clear();
        full.push(f);
        full.extend(perm.iter().map(|&p| idx[p]));
        t.set(&full, value);
    }
    if n == 0 {
        t.set(&[f], value);
    }
}

/// Matrix from codomain x domain, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOperator {
    pub matrix: Vec<f64>,
    pub domain: NormedSpace,
    pub codomain: NormedSpace,
}

impl LinearOperator {
    pub fn new(matrix: Vec<f64>, domain: NormedSpace, codomain: NormedSpace) -> Result<Self> {
        if matrix.len() != domain.dim * codomain.dim {
            return Err(Error::DimensionMismatch {
                expected: domain.dim * codomain.dim,
                got: matrix.len(),
            });
        }
        Ok(LinearOperator { matrix, domain, codomain })
    }

    pub fn identity(space: NormedSpace) -> Self {
        let mut matrix = vec![0.0; space.dim * space.dim];
        for i in 0..space.dim {
            matrix[i * space.dim + i] = 1.0;
        }
        LinearOperator { matrix, domain: space, codomain: space }
    }

    pub fn zero(domain: NormedSpace, codomain: NormedSpace) -> Self {
        LinearOperator { matrix: vec![0.0; domain.dim * codomain.dim], domain, codomain }
    }

    /// x -> phi(x) y.
    pub fn rank_one(phi: &Functional, y: &Vector) -> Self {
        let mut matrix = Vec::with_capacity(phi.coords.len() * y.coords.len());
        for &yf in &y.coords {
            for &pe in &phi.coords {
                matrix.push(yf * pe);
            }
        }
        LinearOperator { matrix, domain: phi.space, codomain: y.space }
    }

    pub fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        let (rows, cols) = (self.codomain.dim, self.domain.dim);
        let mut out = vec![0.0; rows];
        for (f, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for e in 0..cols {
                acc += self.matrix[f * cols + e] * x[e];
            }
            *slot = acc;
        }
        out
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.space != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "operator domain {:?}, argument in {:?}",
                self.domain, x.space
            )));
        }
        Vector::new(self.apply_coords(&x.coords), self.codomain)
    }

    /// Transpose with dual space tags: T': F' -> E'.
    pub fn adjoint(&self) -> LinearOperator {
        let (rows, cols) = (self.codomain.dim, self.domain.dim);
        let mut matrix = vec![0.0; rows * cols];
        for f in 0..rows {
            for e in 0..cols {
                matrix[e * rows + f] = self.matrix[f * cols + e];
            }
        }
        LinearOperator { matrix, domain: self.codomain.dual(), codomain: self.domain.dual() }
    }

    /// self after `inner`: (self o inner)(x) = self(inner(x)).
    pub fn compose(&self, inner: &LinearOperator) -> Result<LinearOperator> {
        if inner.codomain != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "inner codomain {:?} does not feed outer domain {:?}",
                inner.codomain, self.domain
            )));
        }
        let (r, k, c) = (self.codomain.dim, self.domain.dim, inner.domain.dim);
        let mut matrix = vec![0.0; r * c];
        for f in 0..r {
            for j in 0..c {
                let mut acc = 0.0;
                for i in 0..k {
                    acc += self.matrix[f * k + i] * inner.matrix[i * c + j];
                }
                matrix[f * c + j] = acc;
            }
        }
        Ok(LinearOperator { matrix, domain: inner.domain, codomain: self.codomain })
    }

    pub fn as_multilinear(&self) -> MultilinearOperator {
        let tensor =
            Tensor::new(vec![self.codomain.dim, self.domain.dim], self.matrix.clone()).unwrap();
        MultilinearOperator { tensor, domains: vec![self.domain], codomain: self.codomain }
    }

    pub fn as_polynomial(&self) -> HomogeneousPolynomial {
        let tensor =
            Tensor::new(vec![self.codomain.dim, self.domain.dim], self.matrix.clone()).unwrap();
        HomogeneousPolynomial {
            degree: 1,
            tensor,
            domain: self.domain,
            codomain: self.codomain,
        }
    }
}

/// Coefficient tensor of shape [dim F, dim E_1, ..., dim E_n].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilinearOperator {
    pub tensor: Tensor,
    pub domains: Vec<NormedSpace>,
    pub codomain: NormedSpace,
}

impl MultilinearOperator {
    pub fn new(tensor: Tensor, domains: Vec<NormedSpace>, codomain: NormedSpace) -> Result<Self> {
        let mut shape = Vec::with_capacity(domains.len() + 1);
        shape.push(codomain.dim);
        shape.extend(domains.iter().map(|d| d.dim));
        if tensor.shape() != shape.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: shape.iter().product(),
                got: tensor.data().len(),
            });
        }
        Ok(MultilinearOperator { tensor, domains, codomain })
    }

    pub fn zero(domains: Vec<NormedSpace>, codomain: NormedSpace) -> Self {
        let mut shape = vec![codomain.dim];
        shape.extend(domains.iter().map(|d| d.dim));
        MultilinearOperator { tensor: Tensor::zeros(shape), domains, codomain }
    }

    pub fn degree(&self) -> usize {
        self.domains.len()
    }

    pub fn apply_coords(&self, args: &[&[f64]]) -> Vec<f64> {
        let mut t = self.tensor.clone();
        // Contract the first domain axis each round; axis 0 stays the codomain.
        for coords in args {
            t = t.contract_axis(1, coords).expect("validated arity");
        }
        t.data().to_vec()
    }

    pub fn apply(&self, args: &[Vector]) -> Result<Vector> {
        if args.len() != self.degree() {
            return Err(Error::ArityMismatch { expected: self.degree(), got: args.len() });
        }
        for (x, d) in args.iter().zip(&self.domains) {
            if x.space != *d {
                return Err(Error::SpaceMismatch(format!(
                    "slot expects {:?}, argument in {:?}",
                    d, x.space
                )));
            }
        }
        let coords: Vec<&[f64]> = args.iter().map(|x| x.coords.as_slice()).collect();
        Vector::new(self.apply_coords(&coords), self.codomain)
    }

    /// Freeze slot `slot` at `a`, producing a degree n-1 operator.
    pub fn fix_argument(&self, slot: usize, a: &Vector) -> Result<MultilinearOperator> {
        if slot >= self.degree() {
            return Err(Error::SlotOutOfRange { slot, degree: self.degree() });
        }
        if a.space != self.domains[slot] {
            return Err(Error::SpaceMismatch(format!(
                "slot {slot} expects {:?}, argument in {:?}",
                self.domains[slot], a.space
            )));
        }
        let tensor = self.tensor.contract_axis(slot + 1, &a.coords)?;
        let mut domains = self.domains.clone();
        domains.remove(slot);
        Ok(MultilinearOperator { tensor, domains, codomain: self.codomain })
    }

    /// (gamma T)(x_1, ..., x_{n+1}) = gamma(x_{n+1}) T(x_1, ..., x_n).
    pub fn multiply_functional(&self, gamma: &Functional) -> MultilinearOperator {
        let tensor = self.tensor.outer_last(&gamma.coords);
        let mut domains = self.domains.clone();
        domains.push(gamma.space);
        MultilinearOperator { tensor, domains, codomain: self.codomain }
    }

    /// post o self o (pre_1, ..., pre_n).
    pub fn compose(
        &self,
        post: &LinearOperator,
        pre: &[LinearOperator],
    ) -> Result<MultilinearOperator> {
        if pre.len() != self.degree() {
            return Err(Error::ArityMismatch { expected: self.degree(), got: pre.len() });
        }
        if post.domain != self.codomain {
            return Err(Error::SpaceMismatch(format!(
                "post-map domain {:?} does not accept codomain {:?}",
                post.domain, self.codomain
            )));
        }
        for (j, a) in pre.iter().enumerate() {
            if a.codomain != self.domains[j] {
                return Err(Error::SpaceMismatch(format!(
                    "pre-map {j} lands in {:?}, slot expects {:?}",
                    a.codomain, self.domains[j]
                )));
            }
        }
        let mut t = self.tensor.clone();
        for (j, a) in pre.iter().enumerate() {
            t = t.transform_axis(j + 1, &a.matrix, a.domain.dim)?;
        }
        // Codomain axis wants post applied from the left, i.e. the transpose
        // in transform_axis's convention.
        let (rows, cols) = (post.codomain.dim, post.domain.dim);
        let mut mt = vec![0.0; rows * cols];
        for f in 0..rows {
            for e in 0..cols {
                mt[e * rows + f] = post.matrix[f * cols + e];
            }
        }
        t = t.transform_axis(0, &mt, rows)?;
        Ok(MultilinearOperator {
            tensor: t,
            domains: pre.iter().map(|a| a.domain).collect(),
            codomain: post.codomain,
        })
    }

    /// Drop a trailing one-dimensional slot by evaluating it at 1.
    pub fn restrict_scalar(&self) -> Result<MultilinearOperator> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        let last = self.domains[n - 1];
        if last.dim != 1 {
            return Err(Error::NotScalarSlot { dim: last.dim });
        }
        let tensor = self.tensor.contract_axis(n, &[1.0])?;
        Ok(MultilinearOperator {
            tensor,
            domains: self.domains[..n - 1].to_vec(),
            codomain: self.codomain,
        })
    }

    pub fn to_linear(&self) -> Result<LinearOperator> {
        if self.degree() != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: self.degree() });
        }
        Ok(LinearOperator {
            matrix: self.tensor.data().to_vec(),
            domain: self.domains[0],
            codomain: self.codomain,
        })
    }

    /// Coefficients g with phi(T(..., v at `slot`, ...)) = <g, v>, all other
    /// slots frozen at the given arguments.
    pub fn gradient_in_slot(&self, slot: usize, args: &[Vector], phi: &Functional) -> Vec<f64> {
        let mut t = self.tensor.contract_axis(0, &phi.coords).expect("codomain dim");
        for j in 0..self.degree() {
            if j == slot {
                continue;
            }
            let axis = if j < slot { 0 } else { 1 };
            t = t.contract_axis(axis, &args[j].coords).expect("validated");
        }
        t.data().to_vec()
    }

    pub fn symmetry_deviation_in_first(&self, count: usize) -> f64 {
        let axes: Vec<usize> = (1..=count).collect();
        self.tensor.symmetry_deviation(&axes)
    }
}

/// Degree-n homogeneous polynomial; `tensor` is symmetric in the n domain
/// axes, bitwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPolynomial {
    pub degree: usize,
    tensor: Tensor,
    pub domain: NormedSpace,
    pub codomain: NormedSpace,
}

impl HomogeneousPolynomial {
    /// Accepts any tensor of the right shape and symmetrizes it; the second
    /// return value is the largest entry deviation of the input from its
    /// symmetrization (0 for already-symmetric input).
    pub fn new_symmetrized(
        degree: usize,
        tensor: Tensor,
        domain: NormedSpace,
        codomain: NormedSpace,
    ) -> Result<(Self, f64)> {
        let mut shape = vec![codomain.dim];
        shape.extend(std::iter::repeat(domain.dim).take(degree));
        if tensor.shape() != shape.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: shape.iter().product(),
                got: tensor.data().len(),
            });
        }
        let axes: Vec<usize> = (1..=degree).collect();
        let deviation = tensor.symmetry_deviation(&axes);
        let sym = symmetrize_domains(&tensor, degree, domain.dim, codomain.dim);
        Ok((HomogeneousPolynomial { degree, tensor: sym, domain, codomain }, deviation))
    }

    pub fn new(
        degree: usize,
        tensor: Tensor,
        domain: NormedSpace,
        codomain: NormedSpace,
    ) -> Result<Self> {
        Self::new_symmetrized(degree, tensor, domain, codomain).map(|(p, _)| p)
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        let mut t = self.tensor.clone();
        for _ in 0..self.degree {
            t = t.contract_axis(1, x).expect("shape");
        }
        t.data().to_vec()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.space != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "polynomial domain {:?}, argument in {:?}",
                self.domain, x.space
            )));
        }
        Vector::new(self.apply_coords(&x.coords), self.codomain)
    }

    /// The symmetric multilinear form with P-check(x, ..., x) = P(x),
    /// computed entrywise from the signed-sum polarization formula
    /// P-check(x_1, ..., x_n) = 1/(2^n n!) sum_eps eps_1...eps_n P(sum eps_j x_j).
    pub fn polarize(&self) -> MultilinearOperator {
        let n = self.degree;
        let d = self.domain.dim;
        let tensor = symmetric_tensor_from_evaluator(
            |coords| self.apply_coords(coords),
            n,
            self.domain,
            self.codomain,
        );
        debug_assert_eq!(tensor.shape().len(), n + 1);
        let _ = d;
        MultilinearOperator {
            tensor,
            domains: vec![self.domain; n],
            codomain: self.codomain,
        }
    }

    /// (gamma P)(x) = gamma(x) P(x) as a degree n+1 polynomial. The stored
    /// tensor realizes (gamma P)-check(x_1,...,x_{n+1})
    /// = 1/(n+1) sum_k gamma(x_k) P-check(x_1, ..[k].., x_{n+1}).
    pub fn multiply_functional_poly(&self, gamma: &Functional) -> Result<HomogeneousPolynomial> {
        if gamma.space != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "functional on {:?}, polynomial domain {:?}",
                gamma.space, self.domain
            )));
        }
        let n = self.degree;
        let d = self.domain.dim;
        let df = self.codomain.dim;
        let mut shape = vec![df];
        shape.extend(std::iter::repeat(d).take(n + 1));
        let mut out = Tensor::zeros(shape);
        let scale = 1.0 / (n + 1) as f64;
        let mut reduced = vec![0usize; n + 1];
        for idx in sorted_multi_indices(n + 1, d) {
            for f in 0..df {
                let mut acc = 0.0;
                for k in 0..=n {
                    reduced.clear();
                    reduced.push(f);
                    for (pos, &i) in idx.iter().enumerate() {
                        if pos != k {
                            reduced.push(i);
                        }
                    }
                    acc += gamma.coords[idx[k]] * self.tensor.get(&reduced);
                }
                write_orbit(&mut out, f, &idx, acc * scale);
            }
        }
        Ok(HomogeneousPolynomial {
            degree: n + 1,
            tensor: out,
            domain: self.domain,
            codomain: self.codomain,
        })
    }

    /// P_a(x) = P-check(a, x, ..., x), a degree n-1 polynomial.
    pub fn fix_diagonal(&self, a: &Vector) -> Result<HomogeneousPolynomial> {
        if self.degree == 0 {
            return Err(Error::DegreeRange { k: 0, n: 0 });
        }
        if a.space != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "polynomial domain {:?}, argument in {:?}",
                self.domain, a.space
            )));
        }
        let tensor = self.tensor.contract_axis(1, &a.coords)?;
        Ok(HomogeneousPolynomial {
            degree: self.degree - 1,
            tensor,
            domain: self.domain,
            codomain: self.codomain,
        })
    }

    /// k-th normalized differential at `a`:
    /// x -> C(n, k) P-check(a^{n-k}, x^k), a degree-k polynomial.
    pub fn differential(&self, a: &Vector, k: usize) -> Result<HomogeneousPolynomial> {
        let n = self.degree;
        if k > n {
            return Err(Error::DegreeRange { k, n });
        }
        if a.space != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "polynomial domain {:?}, point in {:?}",
                self.domain, a.space
            )));
        }
        let mut t = self.tensor.clone();
        for _ in 0..n - k {
            t = t.contract_axis(1, &a.coords)?;
        }
        let c = binomial(n, k);
        if c != 1.0 {
            for v in t.data_mut() {
                *v *= c;
            }
        }
        Ok(HomogeneousPolynomial { degree: k, tensor: t, domain: self.domain, codomain: self.codomain })
    }

    pub fn to_linear(&self) -> Result<LinearOperator> {
        if self.degree != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: self.degree });
        }
        Ok(LinearOperator {
            matrix: self.tensor.data().to_vec(),
            domain: self.domain,
            codomain: self.codomain,
        })
    }
}

/// Canonical symmetrization over the domain axes: each orbit's average is
/// computed once from the sorted representative and copied to every member.
fn symmetrize_domains(t: &Tensor, degree: usize, d: usize, df: usize) -> Tensor {
    if degree < 2 {
        return t.clone();
    }
    let perms = permutations(degree);
    let scale = 1.0 / perms.len() as f64;
    let mut out = Tensor::zeros(t.shape().to_vec());
    let mut full = vec![0usize; degree + 1];
    for idx in sorted_multi_indices(degree, d) {
        for f in 0..df {
            let mut acc = 0.0;
            for perm in &perms {
                full[0] = f;
                for (slot, &p) in perm.iter().enumerate() {
                    full[slot + 1] = idx[p];
                }
                acc += t.get(&full);
            }
            write_orbit(&mut out, f, &idx, acc * scale);
        }
    }
    out
}

/// Symmetric tensor of the polarization of an arbitrary degree-n homogeneous
/// evaluator: entry (f; i_1 <= ... <= i_n) is the f-th coordinate of
/// 1/(2^n n!) sum over signs eps of eps_1...eps_n eval(sum_j eps_j e_{i_j}).
pub(crate) fn symmetric_tensor_from_evaluator<F>(
    eval: F,
    degree: usize,
    domain: NormedSpace,
    codomain: NormedSpace,
) -> Tensor
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let d = domain.dim;
    let df = codomain.dim;
    let mut shape = vec![df];
    shape.extend(std::iter::repeat(d).take(degree));
    let mut out = Tensor::zeros(shape);
    let scale = 1.0 / ((1u64 << degree) as f64 * factorial(degree));
    let mut point = vec![0.0; d];
    for idx in sorted_multi_indices(degree, d) {
        let mut acc = vec![0.0; df];
        for bits in 0..(1u64 << degree) {
            point.iter_mut().for_each(|c| *c = 0.0);
            let mut sign = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                if bits >> j & 1 == 1 {
                    point[i] += 1.0;
                } else {
                    point[i] -= 1.0;
                    sign = -sign;
                }
            }
            let v = eval(&point);
            for (a, &vf) in acc.iter_mut().zip(&v) {
                *a += sign * vf;
            }
        }
        for (f, &a) in acc.iter().enumerate() {
            write_orbit(&mut out, f, &idx, a * scale);
        }
    }
    out
}

/// One of the three operator kinds, as parsed from documents and consumed by
/// the estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnyOperator {
    Linear(LinearOperator),
    Multilinear(MultilinearOperator),
    Polynomial(HomogeneousPolynomial),
}

impl AnyOperator {
    /// Number of vector arguments.
    pub fn degree(&self) -> usize {
        match self {
            AnyOperator::Linear(_) => 1,
            AnyOperator::Multilinear(t) => t.degree(),
            AnyOperator::Polynomial(p) => p.degree,
        }
    }

    pub fn domains(&self) -> Vec<NormedSpace> {
        match self {
            AnyOperator::Linear(t) => vec![t.domain],
            AnyOperator::Multilinear(t) => t.domains.clone(),
            AnyOperator::Polynomial(p) => vec![p.domain; p.degree],
        }
    }

    pub fn codomain(&self) -> NormedSpace {
        match self {
            AnyOperator::Linear(t) => t.codomain,
            AnyOperator::Multilinear(t) => t.codomain,
            AnyOperator::Polynomial(p) => p.codomain,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AnyOperator::Linear(t) => t.matrix.iter().all(|&c| c == 0.0),
            AnyOperator::Multilinear(t) => t.tensor.data().iter().all(|&c| c == 0.0),
            AnyOperator::Polynomial(p) => p.tensor().data().iter().all(|&c| c == 0.0),
        }
    }
}

/// T(x_1, ..., x_n) = gamma_1(x_1) ... gamma_{n-1}(x_{n-1}) u(x_n) for
/// functionals gamma_j and a linear map u; an n-linear operator.
pub fn functional_tensor(
    gammas: &[Functional],
    u: &LinearOperator,
) -> Result<MultilinearOperator> {
    let n = gammas.len() + 1;
    let df = u.codomain.dim;
    let mut shape = vec![df];
    shape.extend(gammas.iter().map(|g| g.space.dim));
    shape.push(u.domain.dim);
    let mut data = Vec::with_capacity(shape.iter().product());
    let mut idx = vec![0usize; n + 1];
    let shape_c = shape.clone();
    loop {
        let f = idx[0];
        let mut v = u.matrix[f * u.domain.dim + idx[n]];
        for (j, g) in gammas.iter().enumerate() {
            v *= g.coords[idx[j + 1]];
        }
        data.push(v);
        if !increment(&mut idx, &shape_c) {
            break;
        }
    }
    debug_assert_eq!(offset(&vec![0; n + 1], &shape_c), 0);
    let mut domains: Vec<NormedSpace> = gammas.iter().map(|g| g.space).collect();
    domains.push(u.domain);
    MultilinearOperator::new(Tensor::new(shape, data)?, domains, u.codomain)
}

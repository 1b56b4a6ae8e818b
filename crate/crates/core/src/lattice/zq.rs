use crate::error::{Error, Result};
use rand::{Rng, RngCore};

/// Largest modulus accepted anywhere in the library.
pub const MAX_MODULUS: u64 = 1 << 62;

/// A modulus `q >= 2`, with arithmetic on canonical representatives in `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&q) {
            return Err(Error::Param(format!("modulus {q} outside [2, 2^62]")));
        }
        Ok(Self(q))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Number of bits in the binary expansion of `q - 1`, i.e. `ceil(log2 q)`.
    pub fn bits(self) -> usize {
        (64 - (self.0 - 1).leading_zeros()) as usize
    }

    /// Bytes used per entry in the canonical encoding.
    pub fn entry_bytes(self) -> usize {
        self.bits().div_ceil(8)
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64> {
        let (mut r0, mut r1) = (self.0 as i128, (a % self.0) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        if r0 != 1 {
            return Err(Error::NotInvertible(format!("{a} mod {}", self.0)));
        }
        Ok(t0.rem_euclid(self.0 as i128) as u64)
    }

    #[inline]
    pub fn from_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn from_i128(self, x: i128) -> u64 {
        x.rem_euclid(self.0 as i128) as u64
    }

    /// Signed representative in `(-q/2, q/2]`.
    #[inline]
    pub fn center(self, a: u64) -> i64 {
        if a > self.0 / 2 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }

    pub fn uniform<R: RngCore + ?Sized>(self, rng: &mut R) -> u64 {
        rng.random_range(0..self.0)
    }

    /// How many products of two reduced residues can be summed in a `u128`
    /// before a reduction is required.
    fn lazy_batch(self) -> usize {
        let sq = (self.0 as u128 - 1) * (self.0 as u128 - 1);
        if sq == 0 {
            return usize::MAX;
        }
        (u128::MAX / sq - 1).clamp(1, 1 << 20) as usize
    }

    /// Inner product of two residue slices.
    pub fn dot(self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        let q = self.0 as u128;
        let batch = self.lazy_batch();
        let mut acc: u128 = 0;
        for (ca, cb) in a.chunks(batch).zip(b.chunks(batch)) {
            let mut part: u128 = acc;
            for (&x, &y) in ca.iter().zip(cb) {
                part += x as u128 * y as u128;
            }
            acc = part % q;
        }
        acc as u64
    }
}

/// Returns true when `n` is prime (deterministic Miller-Rabin for 64-bit inputs).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let m = Modulus(n);
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = m.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = m.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// A vector over `Z_q` stored as canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqVector {
    q: Modulus,
    data: Vec<u64>,
}

impl ZqVector {
    pub fn zero(q: Modulus, len: usize) -> Self {
        Self { q, data: vec![0; len] }
    }

    /// Builds a vector, reducing every entry into `[0, q)`.
    pub fn from_u64(q: Modulus, data: Vec<u64>) -> Self {
        let qv = q.value();
        let data = data.into_iter().map(|x| x % qv).collect();
        Self { q, data }
    }

    pub fn from_i64(q: Modulus, data: &[i64]) -> Self {
        Self { q, data: data.iter().map(|&x| q.from_i64(x)).collect() }
    }

    /// Builds a vector whose entries must already be reduced.
    pub fn from_canonical(q: Modulus, data: Vec<u64>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|&&x| x >= q.value()) {
            return Err(Error::Range(format!("entry {bad} not reduced mod {}", q.value())));
        }
        Ok(Self { q, data })
    }

    pub fn uniform<R: RngCore + ?Sized>(q: Modulus, len: usize, rng: &mut R) -> Self {
        Self { q, data: (0..len).map(|_| q.uniform(rng)).collect() }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.q
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, v: u64) {
        self.data[i] = v % self.q.value();
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("vector lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = self.q;
        Ok(Self { q, data: self.data.iter().zip(&other.data).map(|(&a, &b)| q.add(a, b)).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = self.q;
        Ok(Self { q, data: self.data.iter().zip(&other.data).map(|(&a, &b)| q.sub(a, b)).collect() })
    }

    pub fn scale(&self, c: u64) -> Self {
        let q = self.q;
        let c = c % q.value();
        Self { q, data: self.data.iter().map(|&a| q.mul(a, c)).collect() }
    }

    pub fn dot(&self, other: &Self) -> Result<u64> {
        self.check(other)?;
        Ok(self.q.dot(&self.data, &other.data))
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { q: self.q, data })
    }

    /// Signed view with entries in `(-q/2, q/2]`.
    pub fn centered(&self) -> IntVector {
        IntVector(self.data.iter().map(|&a| self.q.center(a)).collect())
    }
}

/// A dense row-major matrix over `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqMatrix {
    q: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZqMatrix {
    pub fn zero(q: Modulus, rows: usize, cols: usize) -> Self {
        Self { q, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(q: Modulus, n: usize) -> Self {
        let mut m = Self::zero(q, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % q.value();
        }
        m
    }

    pub fn from_rows(q: Modulus, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for {rows}x{cols}", data.len())));
        }
        let qv = q.value();
        Ok(Self { q, rows, cols, data: data.into_iter().map(|x| x % qv).collect() })
    }

    pub fn from_i64(q: Modulus, rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for {rows}x{cols}", data.len())));
        }
        Ok(Self { q, rows, cols, data: data.iter().map(|&x| q.from_i64(x)).collect() })
    }

    pub fn uniform<R: RngCore + ?Sized>(q: Modulus, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self { q, rows, cols, data: (0..rows * cols).map(|_| q.uniform(rng)).collect() }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.q
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.q.value();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.q, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ZqVector) -> Result<ZqVector> {
        if self.q != v.q {
            return Err(Error::ModulusMismatch(self.q.value(), v.q.value()));
        }
        if self.cols != v.len() {
            return Err(Error::Dimension(format!("{}x{} times {}", self.rows, self.cols, v.len())));
        }
        let data = (0..self.rows).map(|r| self.q.dot(self.row(r), &v.data)).collect();
        Ok(ZqVector { q: self.q, data })
    }

    /// Product with a signed integer vector, reduced mod `q`.
    pub fn mul_int(&self, v: &IntVector) -> Result<ZqVector> {
        self.mul_vec(&ZqVector::from_i64(self.q, &v.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let t = other.transpose();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                data.push(self.q.dot(self.row(r), t.row(c)));
            }
        }
        Ok(Self { q: self.q, rows: self.rows, cols: other.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let q = self.q;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| q.add(a, b)).collect();
        Ok(Self { q, rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let q = self.q;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| q.sub(a, b)).collect();
        Ok(Self { q, rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        let q = self.q;
        Self { q, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| q.neg(a)).collect() }
    }

    pub fn scale(&self, c: u64) -> Self {
        let q = self.q;
        let c = c % q.value();
        Self { q, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| q.mul(a, c)).collect() }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("row counts {} and {}", self.rows, other.rows)));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self { q: self.q, rows: self.rows, cols, data })
    }

    /// Vertical concatenation of `self` above `other`.
    pub fn vconcat(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("column counts {} and {}", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { q: self.q, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Product with a small signed integer matrix (e.g. a trapdoor).
    pub fn mul_int_matrix(&self, other: &IntMatrix) -> Result<Self> {
        let lifted = ZqMatrix::from_i64(self.q, other.rows, other.cols, &other.data)?;
        self.mul(&lifted)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q.value(), other.q.value()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// A vector of signed integers (short lattice vectors, errors, responses).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inf_norm(&self) -> u64 {
        inf_norm(&self.0)
    }

    pub fn l2_norm_sq(&self) -> u128 {
        l2_norm_sq(&self.0)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("vector lengths {} and {}", self.len(), other.len())));
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }
}

/// A dense row-major matrix of signed integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for {rows}x{cols}", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> IntVector {
        IntVector((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Exact integer product with an integer vector.
    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i128>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{}x{} times {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum())
            .collect())
    }
}

/// A vector with entries in `{0, 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Range("bit vector entry outside {0,1}".into()));
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&b| b as i64).collect()
    }
}

/// Sparse matrix over `Z_q` in compressed-row form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseZqMatrix {
    q: Modulus,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<u64>,
}

impl SparseZqMatrix {
    pub fn new(q: Modulus, cols: usize) -> Self {
        Self { q, cols, row_ptr: vec![0], col_idx: Vec::new(), vals: Vec::new() }
    }

    /// Appends a row given as `(column, value)` pairs; duplicate columns are summed
    /// and zero entries dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, u64)>) -> Result<()> {
        let mut row: Vec<(usize, u64)> = entries.into_iter().collect();
        row.sort_unstable_by_key(|e| e.0);
        let q = self.q;
        let mut last: Option<usize> = None;
        for (c, v) in row {
            if c >= self.cols {
                return Err(Error::Dimension(format!("column {c} outside {}", self.cols)));
            }
            let v = v % q.value();
            if last == Some(c) {
                let slot = self.vals.last_mut().expect("entry exists for repeated column");
                *slot = q.add(*slot, v);
            } else {
                self.col_idx.push(c as u32);
                self.vals.push(v);
                last = Some(c);
            }
        }
        // drop zeros produced by cancellation or zero inputs
        let start = *self.row_ptr.last().expect("row_ptr non-empty");
        let mut w = start;
        for r in start..self.vals.len() {
            if self.vals[r] != 0 {
                self.vals[w] = self.vals[r];
                self.col_idx[w] = self.col_idx[r];
                w += 1;
            }
        }
        self.vals.truncate(w);
        self.col_idx.truncate(w);
        self.row_ptr.push(w);
        Ok(())
    }

    pub fn modulus(&self) -> Modulus {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].iter().zip(&self.vals[a..b]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn mul_vec(&self, x: &ZqVector) -> Result<ZqVector> {
        if x.modulus() != self.q {
            return Err(Error::ModulusMismatch(self.q.value(), x.modulus().value()));
        }
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("sparse {} columns times {}", self.cols, x.len())));
        }
        let q = self.q;
        let qq = q.value() as u128;
        let batch = q.lazy_batch();
        let xs = x.as_slice();
        let data = (0..self.rows())
            .map(|r| {
                let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
                let mut acc: u128 = 0;
                for (k, i) in (a..b).enumerate() {
                    acc += self.vals[i] as u128 * xs[self.col_idx[i] as usize] as u128;
                    if (k + 1) % batch == 0 {
                        acc %= qq;
                    }
                }
                (acc % qq) as u64
            })
            .collect();
        Ok(ZqVector { q, data })
    }

    pub fn to_dense(&self) -> ZqMatrix {
        let mut m = ZqMatrix::zero(self.q, self.rows(), self.cols);
        for r in 0..self.rows() {
            for (c, v) in self.row(r) {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[u64] {
        &self.vals
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn from_parts(q: Modulus, cols: usize, row_ptr: Vec<usize>, col_idx: Vec<u32>, vals: Vec<u64>) -> Result<Self> {
        let ok = row_ptr.first() == Some(&0)
            && row_ptr.windows(2).all(|w| w[0] <= w[1])
            && row_ptr.last() == Some(&vals.len())
            && col_idx.len() == vals.len()
            && col_idx.iter().all(|&c| (c as usize) < cols)
            && vals.iter().all(|&v| v < q.value());
        if !ok {
            return Err(Error::Decode("inconsistent sparse matrix".into()));
        }
        Ok(Self { q, cols, row_ptr, col_idx, vals })
    }
}

pub fn inf_norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

pub fn l2_norm_sq(v: &[i64]) -> u128 {
    v.iter().map(|&x| (x as i128 * x as i128) as u128).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn naive_matvec(m: &ZqMatrix, v: &ZqVector) -> Vec<u64> {
        let q = m.modulus().value() as u128;
        (0..m.rows())
            .map(|r| {
                let mut acc: u128 = 0;
                for c in 0..m.cols() {
                    acc = (acc + (m.get(r, c) as u128 * v.get(c) as u128) % q) % q;
                }
                acc as u64
            })
            .collect()
    }

    #[test]
    fn norms_examples() {
        assert_eq!((inf_norm(&[0, 0, 0]), l2_norm_sq(&[0, 0, 0])), (0, 0));
        assert_eq!((inf_norm(&[3, -4]), l2_norm_sq(&[3, -4])), (4, 25));
        assert_eq!((inf_norm(&[-7, 2, 7]), l2_norm_sq(&[-7, 2, 7])), (7, 102));
    }

    #[test]
    fn matvec_matches_naive_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for q in [5u64, 257, (1 << 61) - 1, (1 << 62) - 57] {
            let q = Modulus::new(q).unwrap();
            for _ in 0..100 {
                let m = ZqMatrix::uniform(q, 8, 8, &mut rng);
                let v = ZqVector::uniform(q, 8, &mut rng);
                assert_eq!(m.mul_vec(&v).unwrap().as_slice(), naive_matvec(&m, &v).as_slice());
                let s = {
                    let mut s = SparseZqMatrix::new(q, 8);
                    for r in 0..8 {
                        s.push_row(m.row(r).iter().copied().enumerate()).unwrap();
                    }
                    s
                };
                assert_eq!(s.mul_vec(&v).unwrap(), m.mul_vec(&v).unwrap());
                assert_eq!(s.to_dense(), m);
            }
        }
    }

    #[test]
    fn mixed_moduli_are_rejected() {
        let a = ZqVector::zero(Modulus::new(5).unwrap(), 3);
        let b = ZqVector::zero(Modulus::new(7).unwrap(), 3);
        assert!(matches!(a.add(&b), Err(Error::ModulusMismatch(5, 7))));
        let m = ZqMatrix::zero(Modulus::new(7).unwrap(), 2, 3);
        assert!(matches!(m.mul_vec(&a), Err(Error::ModulusMismatch(7, 5))));
    }

    #[test]
    fn inverse_and_primality() {
        let q = Modulus::new(17).unwrap();
        for a in 1..17 {
            assert_eq!(q.mul(a, q.inv(a).unwrap()), 1);
        }
        assert!(q.inv(0).is_err());
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime((1 << 61) - 1));
        assert_eq!(next_prime(173), 179);
    }

    proptest! {
        #[test]
        fn dot_matches_wide_oracle(q in 2u64..MAX_MODULUS, seed in any::<u64>()) {
            let q = Modulus::new(q).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a: Vec<u64> = (0..40).map(|_| q.uniform(&mut rng)).collect();
            let b: Vec<u64> = (0..40).map(|_| q.uniform(&mut rng)).collect();
            let want = a.iter().zip(&b).fold(0u128, |acc, (&x, &y)| (acc + x as u128 * y as u128 % q.value() as u128) % q.value() as u128);
            prop_assert_eq!(q.dot(&a, &b) as u128, want);
        }

        #[test]
        fn center_is_signed_representative(q in 2u64..1_000_000, x in any::<u64>()) {
            let q = Modulus::new(q).unwrap();
            let a = x % q.value();
            let c = q.center(a);
            prop_assert_eq!(q.from_i64(c), a);
            prop_assert!(2 * c.unsigned_abs() <= q.value());
        }
    }
}

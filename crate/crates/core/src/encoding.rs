//! Canonical byte encoding shared by every hash input and file format.
//!
//! Integers are little-endian. Each vector or matrix is written as a one-byte
//! type tag, the modulus as `u64`, its dimensions as `u32`, then its entries;
//! `Z_q` entries use `ceil(ceil(log2 q) / 8)` bytes each, matrices are row-major.

use crate::error::{Error, Result};
use crate::lattice::{BitVector, IntMatrix, IntVector, Modulus, SparseZqMatrix, ZqMatrix, ZqVector};

pub mod tag {
    pub const ZQ_VECTOR: u8 = 0x01;
    pub const ZQ_MATRIX: u8 = 0x02;
    pub const INT_VECTOR: u8 = 0x03;
    pub const BIT_VECTOR: u8 = 0x04;
    pub const SPARSE: u8 = 0x05;
    pub const BYTES: u8 = 0x06;
    pub const INT_MATRIX: u8 = 0x07;
    pub const PARAMS: u8 = 0x10;
    pub const GROUP_PUBLIC_KEY: u8 = 0x11;
    pub const MANAGER_KEY: u8 = 0x12;
    pub const OPENER_KEY: u8 = 0x13;
    pub const USER_SECRET: u8 = 0x14;
    pub const CERTIFICATE: u8 = 0x15;
    pub const TRAPDOOR: u8 = 0x16;
    pub const GROUP_SIGNATURE: u8 = 0x17;
    pub const CLAIM: u8 = 0x18;
    pub const REGISTRY: u8 = 0x19;
    pub const JOIN_REQUEST: u8 = 0x1a;
    pub const JOIN_RESPONSE: u8 = 0x1b;
    pub const PENDING_USER: u8 = 0x1c;
    pub const OTS_KEY: u8 = 0x1d;
    pub const USER_SIG_KEY: u8 = 0x1e;
    pub const USER_SIG_PUBLIC: u8 = 0x1f;
    pub const TRACING_TRAPDOOR: u8 = 0x20;
    pub const GROUP_MEMBER: u8 = 0x21;
}

/// Destination for canonical bytes: a buffer or a running hash.
pub trait Sink {
    fn put(&mut self, bytes: &[u8]);

    fn put_u8(&mut self, v: u8) {
        self.put(&[v]);
    }

    fn put_u32(&mut self, v: u32) {
        self.put(&v.to_le_bytes());
    }

    fn put_u64(&mut self, v: u64) {
        self.put(&v.to_le_bytes());
    }

    fn put_i64(&mut self, v: i64) {
        self.put(&v.to_le_bytes());
    }

    fn put_f64(&mut self, v: f64) {
        self.put(&v.to_le_bytes());
    }

    fn put_len(&mut self, n: usize) {
        self.put_u32(u32::try_from(n).expect("dimension fits in u32"));
    }

    /// Length-prefixed byte string.
    fn put_bytes(&mut self, b: &[u8]) {
        self.put_u8(tag::BYTES);
        self.put_u64(b.len() as u64);
        self.put(b);
    }

    fn put_zq_entries(&mut self, q: Modulus, entries: &[u64]) {
        let w = q.entry_bytes();
        let mut buf = Vec::with_capacity(entries.len() * w);
        for &e in entries {
            buf.extend_from_slice(&e.to_le_bytes()[..w]);
        }
        self.put(&buf);
    }

    fn put_zq_vector(&mut self, v: &ZqVector) {
        self.put_u8(tag::ZQ_VECTOR);
        self.put_u64(v.modulus().value());
        self.put_len(v.len());
        self.put_zq_entries(v.modulus(), v.as_slice());
    }

    fn put_zq_matrix(&mut self, m: &ZqMatrix) {
        self.put_u8(tag::ZQ_MATRIX);
        self.put_u64(m.modulus().value());
        self.put_len(m.rows());
        self.put_len(m.cols());
        self.put_zq_entries(m.modulus(), m.as_slice());
    }

    fn put_int_vector(&mut self, v: &IntVector) {
        self.put_u8(tag::INT_VECTOR);
        self.put_u64(0);
        self.put_len(v.len());
        let mut buf = Vec::with_capacity(v.len() * 8);
        for &x in &v.0 {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        self.put(&buf);
    }

    fn put_int_matrix(&mut self, m: &IntMatrix) {
        self.put_u8(tag::INT_MATRIX);
        self.put_u64(0);
        self.put_len(m.rows);
        self.put_len(m.cols);
        let mut buf = Vec::with_capacity(m.data.len() * 8);
        for &x in &m.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        self.put(&buf);
    }

    fn put_bit_vector(&mut self, v: &BitVector) {
        self.put_u8(tag::BIT_VECTOR);
        self.put_u64(2);
        self.put_len(v.len());
        self.put(v.as_slice());
    }

    fn put_sparse(&mut self, m: &SparseZqMatrix) {
        self.put_u8(tag::SPARSE);
        self.put_u64(m.modulus().value());
        self.put_len(m.rows());
        self.put_len(m.cols());
        self.put_u64(m.nnz() as u64);
        for &p in &m.row_ptr()[1..] {
            self.put_u64(p as u64);
        }
        for &c in m.col_indices() {
            self.put_u32(c);
        }
        self.put_zq_entries(m.modulus(), m.values());
    }
}

impl Sink for Vec<u8> {
    fn put(&mut self, bytes: &[u8]) {
        self.extend_from_slice(bytes);
    }
}

/// Counts bytes without storing them.
#[derive(Debug, Default)]
pub struct ByteCounter(pub usize);

impl Sink for ByteCounter {
    fn put(&mut self, bytes: &[u8]) {
        self.0 += bytes.len();
    }
}

impl Sink for sha3::Shake256 {
    fn put(&mut self, bytes: &[u8]) {
        sha3::digest::Update::update(self, bytes);
    }
}

/// Types with a canonical byte encoding.
pub trait Encode {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S);

    fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.encode(&mut v);
        v
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self>;

    /// Decodes and requires that every input byte is consumed.
    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

/// Cursor over canonical bytes with bounds-checked reads.
#[derive(Debug)]
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Decode(format!("{} trailing bytes", self.remaining())));
        }
        Ok(())
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(Error::Decode(format!("need {n} bytes, {} left", self.remaining())));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    pub fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.array()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        let v = f64::from_le_bytes(self.array()?);
        if !v.is_finite() {
            return Err(Error::Decode("non-finite float".into()));
        }
        Ok(v)
    }

    pub fn count(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn expect_tag(&mut self, want: u8) -> Result<()> {
        let got = self.u8()?;
        if got != want {
            return Err(Error::Decode(format!("type tag {got:#04x}, expected {want:#04x}")));
        }
        Ok(())
    }

    pub fn bytes(&mut self) -> Result<Vec<u8>> {
        self.expect_tag(tag::BYTES)?;
        let n = self.u64()?;
        let n = usize::try_from(n).map_err(|_| Error::Decode("length overflow".into()))?;
        Ok(self.take(n)?.to_vec())
    }

    fn modulus(&mut self) -> Result<Modulus> {
        Modulus::new(self.u64()?).map_err(|e| Error::Decode(e.to_string()))
    }

    fn zq_entries(&mut self, q: Modulus, count: usize) -> Result<Vec<u64>> {
        let w = q.entry_bytes();
        let raw = self.take(count.checked_mul(w).ok_or_else(|| Error::Decode("size overflow".into()))?)?;
        let mut out = Vec::with_capacity(count);
        for c in raw.chunks_exact(w) {
            let mut b = [0u8; 8];
            b[..w].copy_from_slice(c);
            let v = u64::from_le_bytes(b);
            if v >= q.value() {
                return Err(Error::Decode(format!("entry {v} not reduced mod {}", q.value())));
            }
            out.push(v);
        }
        Ok(out)
    }

    pub fn zq_vector(&mut self) -> Result<ZqVector> {
        self.expect_tag(tag::ZQ_VECTOR)?;
        let q = self.modulus()?;
        let n = self.count()?;
        let data = self.zq_entries(q, n)?;
        ZqVector::from_canonical(q, data)
    }

    /// Reads a vector and checks its modulus and length.
    pub fn zq_vector_of(&mut self, q: Modulus, len: usize) -> Result<ZqVector> {
        let v = self.zq_vector()?;
        if v.modulus() != q || v.len() != len {
            return Err(Error::Decode(format!(
                "vector mod {} len {}, expected mod {} len {len}",
                v.modulus().value(),
                v.len(),
                q.value()
            )));
        }
        Ok(v)
    }

    pub fn zq_matrix(&mut self) -> Result<ZqMatrix> {
        self.expect_tag(tag::ZQ_MATRIX)?;
        let q = self.modulus()?;
        let rows = self.count()?;
        let cols = self.count()?;
        let n = rows.checked_mul(cols).ok_or_else(|| Error::Decode("size overflow".into()))?;
        let data = self.zq_entries(q, n)?;
        ZqMatrix::from_rows(q, rows, cols, data)
    }

    pub fn zq_matrix_of(&mut self, q: Modulus, rows: usize, cols: usize) -> Result<ZqMatrix> {
        let m = self.zq_matrix()?;
        if m.modulus() != q || m.rows() != rows || m.cols() != cols {
            return Err(Error::Decode(format!(
                "matrix mod {} {}x{}, expected mod {} {rows}x{cols}",
                m.modulus().value(),
                m.rows(),
                m.cols(),
                q.value()
            )));
        }
        Ok(m)
    }

    pub fn int_vector(&mut self) -> Result<IntVector> {
        self.expect_tag(tag::INT_VECTOR)?;
        if self.u64()? != 0 {
            return Err(Error::Decode("integer vector with nonzero modulus field".into()));
        }
        let n = self.count()?;
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::Decode("size overflow".into()))?)?;
        Ok(IntVector(raw.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes"))).collect()))
    }

    pub fn int_vector_of(&mut self, len: usize) -> Result<IntVector> {
        let v = self.int_vector()?;
        if v.len() != len {
            return Err(Error::Decode(format!("integer vector length {}, expected {len}", v.len())));
        }
        Ok(v)
    }

    pub fn int_matrix(&mut self) -> Result<IntMatrix> {
        self.expect_tag(tag::INT_MATRIX)?;
        if self.u64()? != 0 {
            return Err(Error::Decode("integer matrix with nonzero modulus field".into()));
        }
        let rows = self.count()?;
        let cols = self.count()?;
        let n = rows.checked_mul(cols).and_then(|n| n.checked_mul(8)).ok_or_else(|| Error::Decode("size overflow".into()))?;
        let raw = self.take(n)?;
        IntMatrix::new(rows, cols, raw.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }

    pub fn bit_vector(&mut self) -> Result<BitVector> {
        self.expect_tag(tag::BIT_VECTOR)?;
        if self.u64()? != 2 {
            return Err(Error::Decode("bit vector with modulus other than 2".into()));
        }
        let n = self.count()?;
        BitVector::new(self.take(n)?.to_vec()).map_err(|e| Error::Decode(e.to_string()))
    }

    pub fn sparse(&mut self) -> Result<SparseZqMatrix> {
        self.expect_tag(tag::SPARSE)?;
        let q = self.modulus()?;
        let rows = self.count()?;
        let cols = self.count()?;
        let nnz = usize::try_from(self.u64()?).map_err(|_| Error::Decode("nnz overflow".into()))?;
        if rows.saturating_mul(8) > self.remaining() || nnz.saturating_mul(4) > self.remaining() {
            return Err(Error::Decode("sparse matrix larger than input".into()));
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        row_ptr.push(0);
        for _ in 0..rows {
            row_ptr.push(self.u64()? as usize);
        }
        let col_idx = (0..nnz).map(|_| self.u32()).collect::<Result<Vec<_>>>()?;
        let vals = self.zq_entries(q, nnz)?;
        SparseZqMatrix::from_parts(q, cols, row_ptr, col_idx, vals)
    }
}

impl Encode for ZqVector {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_zq_vector(self);
    }
}

impl Decode for ZqVector {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.zq_vector()
    }
}

impl Encode for ZqMatrix {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_zq_matrix(self);
    }
}

impl Decode for ZqMatrix {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.zq_matrix()
    }
}

impl Encode for IntVector {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_int_vector(self);
    }
}

impl Decode for IntVector {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.int_vector()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn layout_of_small_vector() {
        let q = Modulus::new(257).unwrap();
        let v = ZqVector::from_u64(q, vec![1, 256]);
        let b = v.to_bytes();
        assert_eq!(b, [0x01, 1, 1, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 1]);
        assert_eq!(ZqVector::from_bytes(&b).unwrap(), v);
    }

    #[test]
    fn roundtrips_and_rejections() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let q = Modulus::new((1 << 50) - 27).unwrap();
        let m = ZqMatrix::uniform(q, 5, 7, &mut rng);
        assert_eq!(ZqMatrix::from_bytes(&m.to_bytes()).unwrap(), m);
        let iv = IntVector(vec![-3, 0, i64::MAX, i64::MIN]);
        assert_eq!(IntVector::from_bytes(&iv.to_bytes()).unwrap(), iv);

        let mut bytes = m.to_bytes();
        bytes.push(0);
        assert!(ZqMatrix::from_bytes(&bytes).is_err());
        let bytes = m.to_bytes();
        assert!(ZqMatrix::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(ZqVector::from_bytes(&bytes).is_err());

        let mut sp = SparseZqMatrix::new(q, 6);
        sp.push_row([(0, 5), (3, 9)]).unwrap();
        sp.push_row([]).unwrap();
        sp.push_row([(5, 1)]).unwrap();
        let mut buf = Vec::new();
        buf.put_sparse(&sp);
        let mut r = Reader::new(&buf);
        assert_eq!(r.sparse().unwrap(), sp);
        r.finish().unwrap();
    }

    #[test]
    fn unreduced_entry_is_rejected() {
        let b = [0x01, 5, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 5];
        assert!(ZqVector::from_bytes(&b).is_err());
    }
}

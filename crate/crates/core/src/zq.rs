//! Exact arithmetic over the prime field Z_q, index utilities, and domain
//! parameter validation.
//!
//! Residues are stored as `u32` with `u64` intermediates, which is exact for
//! any q < 2^16 (both supported moduli qualify). No Montgomery or Barrett
//! forms: every value is kept fully reduced in [0, q).

use crate::error::{Error, Result};

/// (a * b) mod q. Inputs must already be reduced.
#[inline(always)]
pub fn mod_mul(a: u32, b: u32, q: u32) -> u32 {
    debug_assert!(a < q && b < q);
    ((a as u64 * b as u64) % q as u64) as u32
}

/// (a + b) mod q.
#[inline(always)]
pub fn mod_add(a: u32, b: u32, q: u32) -> u32 {
    debug_assert!(a < q && b < q);
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

/// (a - b) mod q.
#[inline(always)]
pub fn mod_sub(a: u32, b: u32, q: u32) -> u32 {
    debug_assert!(a < q && b < q);
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

/// base^exp mod q by square-and-multiply.
pub fn mod_pow(base: u32, mut exp: u64, q: u32) -> u32 {
    debug_assert!(base < q);
    let mut acc: u32 = 1 % q;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, b, q);
        }
        b = mod_mul(b, b, q);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of a modulo prime q, via the extended Euclidean
/// algorithm.
pub fn mod_inv(a: u32, q: u32) -> Result<u32> {
    if a == 0 {
        return Err(Error::InversionOfZero);
    }
    let (mut r0, mut r1) = (q as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    debug_assert_eq!(r0, 1, "q must be prime and a nonzero");
    Ok(t0.rem_euclid(q as i64) as u32)
}

/// Reverses the low `width` bits of k.
#[inline]
pub fn bit_reverse(k: usize, width: u32) -> usize {
    debug_assert!(width == 0 || k < (1usize << width));
    let mut out = 0usize;
    let mut v = k;
    for _ in 0..width {
        out = (out << 1) | (v & 1);
        v >>= 1;
    }
    out
}

/// Deterministic primality check by trial division; q is bounded by 2^16 in
/// every supported domain so this is instant.
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Ring and transform parameters: length n (a power of two), prime modulus q,
/// a primitive n-th root of unity omega, and optionally a 2n-th root psi with
/// psi^2 = omega for the negacyclic pre/post scaling.
///
/// Twiddle tables (powers of omega, its inverse, psi, psi^-1) are built once
/// at validation and shared immutably afterwards.
#[derive(Debug, Clone)]
pub struct NttDomainParams {
    pub n: usize,
    pub q: u32,
    pub omega: u32,
    pub psi: Option<u32>,
    pub log2n: u32,
    omega_pows: Vec<u32>,
    omega_inv_pows: Vec<u32>,
    psi_pows: Vec<u32>,
    psi_inv_pows: Vec<u32>,
    inv_n: u32,
}

impl NttDomainParams {
    /// Validates all invariants and precomputes the twiddle tables.
    pub fn new(n: usize, q: u32, omega: u32, psi: Option<u32>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidModulus(format!("q={q} is not prime")));
        }
        if q >= 1 << 16 {
            return Err(Error::InvalidModulus(format!("q={q} exceeds 16 bits")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidModulus(format!(
                "n={n} must be a power of two and at least 2"
            )));
        }
        let divisor = if psi.is_some() { 2 * n as u64 } else { n as u64 };
        if !(q as u64 - 1).is_multiple_of(divisor) {
            return Err(Error::InvalidModulus(format!(
                "{divisor} does not divide q-1={}",
                q - 1
            )));
        }
        if omega == 0 || omega >= q {
            return Err(Error::InvalidRoot(format!("omega={omega} out of range")));
        }
        if mod_pow(omega, n as u64, q) != 1 {
            return Err(Error::InvalidRoot(format!("omega^{n} != 1 (mod {q})")));
        }
        if mod_pow(omega, n as u64 / 2, q) != q - 1 {
            return Err(Error::InvalidRoot(format!(
                "omega^{} != -1 (mod {q}), omega is not primitive",
                n / 2
            )));
        }
        if let Some(p) = psi {
            if p == 0 || p >= q {
                return Err(Error::InvalidRoot(format!("psi={p} out of range")));
            }
            if mod_mul(p, p, q) != omega {
                return Err(Error::InvalidRoot(format!("psi^2 != omega (psi={p})")));
            }
            if mod_pow(p, n as u64, q) != q - 1 {
                return Err(Error::InvalidRoot(format!("psi^{n} != -1 (psi={p})")));
            }
        }

        let log2n = n.trailing_zeros();
        let omega_inv = mod_inv(omega, q)?;
        let pows = |base: u32| -> Vec<u32> {
            let mut t = Vec::with_capacity(n);
            let mut acc = 1u32;
            for _ in 0..n {
                t.push(acc);
                acc = mod_mul(acc, base, q);
            }
            t
        };
        let (psi_pows, psi_inv_pows) = match psi {
            Some(p) => (pows(p), pows(mod_inv(p, q)?)),
            None => (Vec::new(), Vec::new()),
        };
        Ok(Self {
            n,
            q,
            omega,
            psi,
            log2n,
            omega_pows: pows(omega),
            omega_inv_pows: pows(omega_inv),
            psi_pows,
            psi_inv_pows,
            inv_n: mod_inv(n as u32 % q, q)?,
        })
    }

    /// The parameter set used by the negacyclic coverage campaigns:
    /// n=256, q=7681, omega=3844, psi=62.
    pub fn round1() -> Self {
        Self::new(256, 7681, 3844, Some(62)).expect("round1 parameters are valid")
    }

    /// n=256, q=3329, omega=17. No 2n-th root exists for this modulus, so
    /// the negacyclic pipeline is unavailable (use the kyber module instead).
    pub fn kyber_field() -> Self {
        Self::new(256, 3329, 17, None).expect("kyber field parameters are valid")
    }

    /// omega^k for 0 <= k < n.
    #[inline(always)]
    pub fn omega_pow(&self, k: usize) -> u32 {
        self.omega_pows[k]
    }

    /// omega^-k for 0 <= k < n.
    #[inline(always)]
    pub fn omega_inv_pow(&self, k: usize) -> u32 {
        self.omega_inv_pows[k]
    }

    pub fn psi_pow(&self, k: usize) -> Result<u32> {
        if self.psi.is_none() {
            return Err(Error::MissingPsi);
        }
        Ok(self.psi_pows[k])
    }

    pub fn psi_inv_pow(&self, k: usize) -> Result<u32> {
        if self.psi.is_none() {
            return Err(Error::MissingPsi);
        }
        Ok(self.psi_inv_pows[k])
    }

    #[inline(always)]
    pub fn inv_n(&self) -> u32 {
        self.inv_n
    }

    /// Butterflies in one forward transform: (n/2) * log2(n).
    pub fn butterfly_count(&self) -> usize {
        self.n / 2 * self.log2n as usize
    }
}

/// Searches for the smallest psi with psi^2 = omega and psi^n = -1; such a
/// root exists exactly when 2n divides q-1.
pub fn find_psi(n: usize, q: u32, omega: u32) -> Option<u32> {
    (2..q).find(|&x| mod_mul(x, x, q) == omega && mod_pow(x, n as u64, q) == q - 1)
}

/// A length-n coefficient vector over Z_q, every element reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZq {
    pub coeffs: Vec<u32>,
}

impl PolyZq {
    /// Validates that every coefficient is reduced modulo q.
    pub fn new(coeffs: Vec<u32>, q: u32) -> Result<Self> {
        if let Some(&c) = coeffs.iter().find(|&&c| c >= q) {
            return Err(Error::InvalidModulus(format!("coefficient {c} >= q={q}")));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }

    /// The monomial X^idx.
    pub fn impulse(n: usize, idx: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[idx] = 1;
        Self { coeffs }
    }

    pub fn uniform<R: rand::Rng>(rng: &mut R, n: usize, q: u32) -> Self {
        Self {
            coeffs: (0..n).map(|_| rng.gen_range(0..q)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// An n x n residue matrix materialized from domain parameters; used by the
/// tests to pin the transform kernels to their defining matrix forms.
#[derive(Debug, Clone)]
pub struct NttMatrixOracle {
    pub matrix: Vec<Vec<u32>>,
    pub q: u32,
}

impl NttMatrixOracle {
    /// The plain transform matrix: entry (i, j) = omega^(i*j).
    pub fn theta(params: &NttDomainParams) -> Self {
        let n = params.n;
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| params.omega_pow(i * j % n)).collect())
            .collect();
        Self { matrix, q: params.q }
    }

    /// The rotated-input matrix: entry (i, j) = omega^(i*(j+1)). Applying it
    /// to a left-rotated input reproduces theta applied to the original.
    pub fn rho(params: &NttDomainParams) -> Self {
        let n = params.n;
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| params.omega_pow(i * ((j + 1) % n) % n)).collect())
            .collect();
        Self { matrix, q: params.q }
    }

    /// The half-size matrix of the seven-stage transform: entry (k, j) =
    /// omega^((2*rev7(k)+1)*j), one row per quadratic factor of X^256+1.
    pub fn kyber_half(params: &NttDomainParams) -> Self {
        let n = params.n / 2;
        let matrix = (0..n)
            .map(|k| {
                let e = 2 * bit_reverse(k, 7) + 1;
                (0..n)
                    .map(|j| mod_pow(params.omega, (e * j) as u64, params.q))
                    .collect()
            })
            .collect();
        Self { matrix, q: params.q }
    }

    /// Plain matrix-vector product mod q.
    pub fn apply(&self, f: &PolyZq) -> Result<PolyZq> {
        let n = self.matrix.len();
        if f.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: f.len() });
        }
        let q = self.q as u64;
        let coeffs = self
            .matrix
            .iter()
            .map(|row| {
                let mut acc = 0u64;
                for (&m, &x) in row.iter().zip(&f.coeffs) {
                    acc += m as u64 * x as u64 % q;
                }
                (acc % q) as u32
            })
            .collect();
        Ok(PolyZq { coeffs })
    }
}

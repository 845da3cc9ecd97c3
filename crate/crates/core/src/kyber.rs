//! The seven-stage incomplete transform over Z_3329[X]/(X^256+1) and its
//! degree-one component-wise multiplication.
//!
//! X^256+1 has no roots over this field (3329 admits 256-th but not 512-th
//! roots of unity), so the transform stops after seven stages and maps a
//! polynomial onto its residues modulo the 128 quadratic factors
//! X^2 - omega^(2*rev7(i)+1). Pair i of the output vector lives at flat
//! positions (2i, 2i+1).

use std::sync::OnceLock;

use crate::fault::PlanWindow;
use crate::zq::{bit_reverse, mod_add, mod_inv, mod_mul, mod_sub, mod_pow, PolyZq};

pub const KYBER_N: usize = 256;
pub const KYBER_Q: u32 = 3329;
pub const KYBER_OMEGA: u32 = 17;
/// Seven stages of 128 butterflies each.
pub const KYBER_BUTTERFLIES: usize = 896;

/// A length-256 coefficient vector over Z_3329.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KyberPoly {
    pub coeffs: [u32; KYBER_N],
}

impl KyberPoly {
    pub fn zero() -> Self {
        Self { coeffs: [0; KYBER_N] }
    }

    pub fn impulse(idx: usize) -> Self {
        let mut coeffs = [0; KYBER_N];
        coeffs[idx] = 1;
        Self { coeffs }
    }

    pub fn uniform<R: rand::Rng>(rng: &mut R) -> Self {
        let mut coeffs = [0; KYBER_N];
        for c in coeffs.iter_mut() {
            *c = rng.gen_range(0..KYBER_Q);
        }
        Self { coeffs }
    }

    pub fn from_poly(p: &PolyZq) -> Self {
        let mut coeffs = [0; KYBER_N];
        coeffs.copy_from_slice(&p.coeffs);
        Self { coeffs }
    }

    pub fn to_poly(&self) -> PolyZq {
        PolyZq { coeffs: self.coeffs.to_vec() }
    }
}

/// Transform output: 128 degree-one residues stored flat in the layout the
/// in-place kernel produces (pair i at positions 2i and 2i+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KyberNttVector {
    pub values: [u32; KYBER_N],
}

impl KyberNttVector {
    pub fn zero() -> Self {
        Self { values: [0; KYBER_N] }
    }

    /// The degree-one pair (constant, linear) for slot i.
    pub fn pair(&self, i: usize) -> (u32, u32) {
        (self.values[2 * i], self.values[2 * i + 1])
    }
}

struct Tables {
    /// zetas[k] = omega^rev7(k); the kernel consumes indices 1..128.
    zetas: [u32; 128],
    inv_zetas: [u32; 128],
    /// gammas[i] = omega^(2*rev7(i)+1), the X^2 residue of slot i.
    gammas: [u32; 128],
    /// 128^-1 mod q, the inverse-transform normalization.
    inv_128: u32,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut zetas = [0u32; 128];
        let mut inv_zetas = [0u32; 128];
        let mut gammas = [0u32; 128];
        for k in 0..128 {
            let rev = bit_reverse(k, 7) as u64;
            zetas[k] = mod_pow(KYBER_OMEGA, rev, KYBER_Q);
            inv_zetas[k] = mod_inv(zetas[k], KYBER_Q).expect("zeta is nonzero");
            gammas[k] = mod_pow(KYBER_OMEGA, 2 * rev + 1, KYBER_Q);
        }
        let inv_128 = mod_inv(128, KYBER_Q).expect("q is prime");
        Tables { zetas, inv_zetas, gammas, inv_128 }
    })
}

/// omega^(2*rev7(i)+1) for slot i; the modulus of that slot's quadratic
/// factor and the gamma fed to [`basemul`].
pub fn gamma(slot: usize) -> u32 {
    tables().gammas[slot]
}

/// In-place seven-stage butterfly network. Stage block-halves run len =
/// 128, 64, ..., 2; the butterfly with twiddle zeta maps (u, v) to
/// (u + zeta*v, u - zeta*v). Returns the number of butterflies executed.
pub(crate) fn kyber_butterflies(
    r: &mut [u32; KYBER_N],
    mut window: Option<&mut PlanWindow<'_>>,
) -> usize {
    use crate::fault::FaultPosition;
    let t = tables();
    let q = KYBER_Q;
    let mut site = 0usize;
    let mut len = 128usize;
    while len >= 2 {
        let mut start = 0usize;
        while start < KYBER_N {
            // block b of stage `len` uses zeta index 128/len + b
            let zeta = t.zetas[128 / len + start / (2 * len)];
            for j in start..start + len {
                let u = r[j];
                let mut prod = mod_mul(zeta, r[j + len], q);
                let c;
                let d;
                if let Some(win) = window.as_deref_mut() {
                    prod = win.tweak(site, FaultPosition::P1, prod);
                    c = win.tweak(site, FaultPosition::P2, mod_add(u, prod, q));
                    d = win.tweak(site, FaultPosition::P3, mod_sub(u, prod, q));
                } else {
                    c = mod_add(u, prod, q);
                    d = mod_sub(u, prod, q);
                }
                r[j] = c;
                r[j + len] = d;
                site += 1;
            }
            start += 2 * len;
        }
        len >>= 1;
    }
    site
}

pub(crate) fn kyber_ntt_with(
    f: &KyberPoly,
    window: Option<&mut PlanWindow<'_>>,
) -> KyberNttVector {
    let mut values = f.coeffs;
    let count = kyber_butterflies(&mut values, window);
    debug_assert_eq!(count, KYBER_BUTTERFLIES);
    KyberNttVector { values }
}

/// Forward seven-stage transform.
pub fn kyber_ntt(f: &KyberPoly) -> KyberNttVector {
    kyber_ntt_with(f, None)
}

/// Executes one transform and returns the butterfly count the kernel
/// actually performed (896).
pub fn executed_butterflies() -> usize {
    let mut values = [0u32; KYBER_N];
    kyber_butterflies(&mut values, None)
}

/// Literal double-loop evaluation of the defining sums: even and odd lanes
/// of slot i are sums of f_{2j} (resp. f_{2j+1}) times gamma_i^j.
/// Quadratic-time oracle pinning the kernel's layout.
pub fn kyber_ntt_direct_oracle(f: &KyberPoly) -> KyberNttVector {
    let t = tables();
    let mut values = [0u32; KYBER_N];
    for i in 0..128 {
        let g = t.gammas[i];
        let mut even = 0u64;
        let mut odd = 0u64;
        let mut gp = 1u32;
        for j in 0..128 {
            even += f.coeffs[2 * j] as u64 * gp as u64 % KYBER_Q as u64;
            odd += f.coeffs[2 * j + 1] as u64 * gp as u64 % KYBER_Q as u64;
            gp = mod_mul(gp, g, KYBER_Q);
        }
        values[2 * i] = (even % KYBER_Q as u64) as u32;
        values[2 * i + 1] = (odd % KYBER_Q as u64) as u32;
    }
    KyberNttVector { values }
}

/// Inverse of [`kyber_ntt`]: unwinds the stages with inverted twiddles and
/// applies the 128^-1 normalization.
pub fn kyber_intt(spectrum: &KyberNttVector) -> KyberPoly {
    let t = tables();
    let q = KYBER_Q;
    let mut r = spectrum.values;
    let mut len = 2usize;
    while len <= 128 {
        let mut start = 0usize;
        while start < KYBER_N {
            let zi = t.inv_zetas[128 / len + start / (2 * len)];
            for j in start..start + len {
                let c = r[j];
                let d = r[j + len];
                r[j] = mod_add(c, d, q);
                r[j + len] = mod_mul(zi, mod_sub(c, d, q), q);
            }
            start += 2 * len;
        }
        len <<= 1;
    }
    let mut coeffs = [0u32; KYBER_N];
    for (o, v) in coeffs.iter_mut().zip(r.iter()) {
        *o = mod_mul(*v, t.inv_128, q);
    }
    KyberPoly { coeffs }
}

/// Degree-one product modulo X^2 - gamma:
/// (a0 + a1 X)(b0 + b1 X) = (a0 b0 + a1 b1 gamma) + (a0 b1 + a1 b0) X.
pub fn basemul(a: (u32, u32), b: (u32, u32), gamma: u32) -> (u32, u32) {
    let q = KYBER_Q;
    let c0 = mod_add(mod_mul(a.0, b.0, q), mod_mul(mod_mul(a.1, b.1, q), gamma, q), q);
    let c1 = mod_add(mod_mul(a.0, b.1, q), mod_mul(a.1, b.0, q), q);
    (c0, c1)
}

/// Full negacyclic product via the transform: 128 degree-one products in the
/// spectral domain, then the inverse transform.
pub fn kyber_poly_mul(f: &KyberPoly, g: &KyberPoly) -> KyberPoly {
    let fs = kyber_ntt(f);
    let gs = kyber_ntt(g);
    let t = tables();
    let mut values = [0u32; KYBER_N];
    for i in 0..128 {
        let (c0, c1) = basemul(fs.pair(i), gs.pair(i), t.gammas[i]);
        values[2 * i] = c0;
        values[2 * i + 1] = c1;
    }
    kyber_intt(&KyberNttVector { values })
}

//! Protected-versus-unprotected cost accounting: measured wall time on the
//! host plus closed-form static operation counts for the detection add-ons.
//!
//! Absolute timings are host-dependent and never asserted; the static
//! counts are exact functions of the domain size and are the stable part
//! of the summary. Per output coefficient the decoders cost two stored
//! multiplications and one addition (seven-stage scheme) or one stored
//! multiplication (negacyclic product scheme); encoders cost one scaling
//! and one addition per coefficient; the checksums are running sums.

use std::hint::black_box;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::campaign::Scheme;
use crate::detect_kyber::{protected_kyber_ntt, KyberCodingParams};
use crate::detect_nwc::{preprocess_reso_check, protected_nwc_pointwise, CodingParams};
use crate::error::{Error, Result};
use crate::kyber::{kyber_ntt, KyberPoly, KYBER_BUTTERFLIES};
use crate::ntt::{ntt_forward, pointwise_mul, pre_process};
use crate::zq::{NttDomainParams, PolyZq};

/// Closed-form operation counts of one protected execution's detection
/// add-ons, derived from the domain size alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticCounts {
    /// Butterflies in the base (unprotected) computation.
    pub base_butterflies: usize,
    pub encoder_adds: usize,
    pub encoder_scalings: usize,
    pub decoder_mults: usize,
    pub decoder_adds: usize,
    pub checksum_adds: usize,
    pub checksum_mults: usize,
    /// Extra multiplier-array evaluations (the recomputation pass).
    pub recompute_mults: usize,
}

impl StaticCounts {
    pub fn for_scheme(scheme: Scheme, n: usize) -> Self {
        match scheme {
            // two encoded inputs; squared-inverse decode is one stored
            // multiply per frequency; checksum sums both scaled inputs and
            // multiplies once
            Scheme::NwcPointwise => StaticCounts {
                base_butterflies: 2 * (n / 2) * n.trailing_zeros() as usize,
                encoder_adds: 2 * n,
                encoder_scalings: 2 * n,
                decoder_mults: n,
                decoder_adds: 0,
                checksum_adds: 2 * (n - 1),
                checksum_mults: 1,
                recompute_mults: 0,
            },
            // shifting is free; the cost is the second multiplier pass and
            // the comparison
            Scheme::NwcPreprocess => StaticCounts {
                base_butterflies: 0,
                encoder_adds: 0,
                encoder_scalings: 0,
                decoder_mults: 0,
                decoder_adds: 0,
                checksum_adds: 0,
                checksum_mults: 0,
                recompute_mults: n,
            },
            // per output coefficient: decode is two stored multiplications
            // and one addition; encode is one scaling and one addition
            Scheme::KyberNtt => StaticCounts {
                base_butterflies: KYBER_BUTTERFLIES,
                encoder_adds: n,
                encoder_scalings: n,
                decoder_mults: 2 * n,
                decoder_adds: n,
                checksum_adds: n - 1,
                checksum_mults: 1,
                recompute_mults: 0,
            },
        }
    }
}

/// Measured and derived overhead of one scheme's protection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverheadSummary {
    pub scheme: Scheme,
    pub iterations: u32,
    pub unprotected_ns: u64,
    pub protected_ns: u64,
    /// protected / unprotected wall time; host-dependent, informational.
    pub overhead_ratio: f64,
    pub static_counts: StaticCounts,
}

/// Times `iterations` runs of the unprotected and protected pipelines on a
/// fixed seeded input and reports the relative overhead plus the static
/// operation counts.
pub fn benchmark_overhead(scheme: Scheme, iterations: u32) -> Result<OverheadSummary> {
    if iterations == 0 {
        return Err(Error::ConfigError(vec!["iterations: must be at least 1".into()]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe7c);
    let (unprotected_ns, protected_ns, n) = match scheme {
        Scheme::KyberNtt => {
            let f = KyberPoly::uniform(&mut rng);
            let coding = KyberCodingParams::default_pair();
            let base = time(iterations, || {
                black_box(kyber_ntt(black_box(&f)));
            });
            let prot = time(iterations, || {
                black_box(protected_kyber_ntt(black_box(&f), &coding, None).unwrap());
            });
            (base, prot, 256)
        }
        Scheme::NwcPointwise => {
            let domain = NttDomainParams::round1();
            let coding = CodingParams::first_valid(&domain);
            let f = PolyZq::uniform(&mut rng, domain.n, domain.q);
            let g = PolyZq::uniform(&mut rng, domain.n, domain.q);
            let base = time(iterations, || {
                let fs = ntt_forward(&pre_process(&f, &domain).unwrap(), &domain).unwrap();
                let gs = ntt_forward(&pre_process(&g, &domain).unwrap(), &domain).unwrap();
                black_box(pointwise_mul(&fs, &gs, domain.q).unwrap());
            });
            let prot = time(iterations, || {
                black_box(protected_nwc_pointwise(&f, &g, &domain, &coding, None).unwrap());
            });
            (base, prot, domain.n)
        }
        Scheme::NwcPreprocess => {
            let domain = NttDomainParams::round1();
            let f = PolyZq::uniform(&mut rng, domain.n, domain.q);
            let base = time(iterations, || {
                black_box(pre_process(&f, &domain).unwrap());
            });
            let prot = time(iterations, || {
                black_box(preprocess_reso_check(&f, &domain, None).unwrap());
            });
            (base, prot, domain.n)
        }
    };
    Ok(OverheadSummary {
        scheme,
        iterations,
        unprotected_ns,
        protected_ns,
        overhead_ratio: protected_ns as f64 / unprotected_ns.max(1) as f64,
        static_counts: StaticCounts::for_scheme(scheme, n),
    })
}

fn time(iterations: u32, mut body: impl FnMut()) -> u64 {
    let start = Instant::now();
    for _ in 0..iterations {
        body();
    }
    start.elapsed().as_nanos() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_counts_closed_forms() {
        let k = StaticCounts::for_scheme(Scheme::KyberNtt, 256);
        assert_eq!(k.base_butterflies, 896);
        assert_eq!((k.encoder_adds, k.encoder_scalings), (256, 256));
        assert_eq!((k.decoder_mults, k.decoder_adds), (512, 256));
        assert_eq!((k.checksum_adds, k.checksum_mults), (255, 1));

        let m = StaticCounts::for_scheme(Scheme::NwcPointwise, 256);
        assert_eq!(m.base_butterflies, 2048);
        assert_eq!((m.encoder_adds, m.encoder_scalings), (512, 512));
        assert_eq!((m.decoder_mults, m.decoder_adds), (256, 0));
        assert_eq!((m.checksum_adds, m.checksum_mults), (510, 1));

        let p = StaticCounts::for_scheme(Scheme::NwcPreprocess, 256);
        assert_eq!(p.recompute_mults, 256);
    }

    #[test]
    fn summary_reports_positive_timings() {
        for scheme in [Scheme::KyberNtt, Scheme::NwcPointwise, Scheme::NwcPreprocess] {
            let s = benchmark_overhead(scheme, 50).unwrap();
            assert!(s.unprotected_ns > 0 && s.protected_ns > 0);
            assert!(s.overhead_ratio > 0.0);
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(benchmark_overhead(Scheme::KyberNtt, 0).is_err());
    }
}

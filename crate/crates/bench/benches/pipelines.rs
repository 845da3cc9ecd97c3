use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nttguard::{
    kyber_ntt, ntt_forward, nwc_multiply, pre_process, preprocess_reso_check,
    protected_kyber_ntt, protected_nwc_pointwise, schoolbook_negacyclic, CodingParams,
    KyberCodingParams, KyberPoly, NttDomainParams, PolyZq,
};

fn bench_transforms(c: &mut Criterion) {
    let domain = NttDomainParams::round1();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = PolyZq::uniform(&mut rng, domain.n, domain.q);
    let kf = KyberPoly::uniform(&mut rng);

    c.bench_function("generic_ntt_forward_256", |b| {
        b.iter(|| black_box(ntt_forward(black_box(&f), &domain).unwrap()))
    });
    c.bench_function("kyber_ntt_256", |b| {
        b.iter(|| black_box(kyber_ntt(black_box(&kf))))
    });
}

fn bench_products(c: &mut Criterion) {
    let domain = NttDomainParams::round1();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = PolyZq::uniform(&mut rng, domain.n, domain.q);
    let g = PolyZq::uniform(&mut rng, domain.n, domain.q);

    c.bench_function("nwc_multiply_256", |b| {
        b.iter(|| black_box(nwc_multiply(black_box(&f), black_box(&g), &domain).unwrap()))
    });
    c.bench_function("schoolbook_negacyclic_256", |b| {
        b.iter(|| black_box(schoolbook_negacyclic(black_box(&f), black_box(&g), domain.q).unwrap()))
    });
}

fn bench_protected(c: &mut Criterion) {
    let domain = NttDomainParams::round1();
    let coding = CodingParams::first_valid(&domain);
    let kyber_coding = KyberCodingParams::default_pair();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = PolyZq::uniform(&mut rng, domain.n, domain.q);
    let g = PolyZq::uniform(&mut rng, domain.n, domain.q);
    let kf = KyberPoly::uniform(&mut rng);

    c.bench_function("protected_nwc_pointwise_256", |b| {
        b.iter(|| {
            black_box(
                protected_nwc_pointwise(black_box(&f), black_box(&g), &domain, &coding, None)
                    .unwrap(),
            )
        })
    });
    c.bench_function("preprocess_reso_check_256", |b| {
        b.iter(|| black_box(preprocess_reso_check(black_box(&f), &domain, None).unwrap()))
    });
    c.bench_function("protected_kyber_ntt_256", |b| {
        b.iter(|| black_box(protected_kyber_ntt(black_box(&kf), &kyber_coding, None).unwrap()))
    });
    c.bench_function("pre_process_256", |b| {
        b.iter(|| black_box(pre_process(black_box(&f), &domain).unwrap()))
    });
}

criterion_group!(benches, bench_transforms, bench_products, bench_protected);
criterion_main!(benches);

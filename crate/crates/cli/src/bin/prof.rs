use ila_core::refscheme::{bgv, Poly, ToyParams};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    for (d, lvl) in [(4usize, 2u32), (16, 2), (16, 1)] {
        let params = ToyParams {
            t: BigInt::from(257),
            d,
            chain: vec![
                (BigInt::from(1u64) << 30) + 3,
                (BigInt::from(1u64) << 45) + 21,
                (BigInt::from(1u64) << 60) + 7,
            ],
            err_width: 1,
        };
        let keys = bgv::keygen(&params, 5);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let p = Poly::from_scalar(&BigInt::from(7), params.d);
        let ct = bgv::encrypt(&keys, &p, lvl, &mut rng);
        let ms = bgv::hom_modswitch(&ct, &params).unwrap();
        let ok = bgv::decrypt(&keys, &ms) == p;
        let noise_before = bgv::eval_noise(&keys, &ct);
        let noise_after = bgv::eval_noise(&keys, &ms);
        println!("d={d} level {lvl}->{}: ok={ok} noise {noise_before} -> {noise_after}", lvl-1);
    }
}

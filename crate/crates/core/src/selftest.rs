//! The invariant suite behind `ppinv selftest`.
//!
//! Every check writes one JSON line; certificates are written in full. All
//! randomness comes from fixed seeds, so two runs produce identical output.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::aml::{self, AmlParams, JointCounts};
use crate::cpp::{self, CppParams};
use crate::error::Result;
use crate::field::{make_field, Elem, FieldCtx};
use crate::linalg;
use crate::linearized::{dickson, linearized_inverse, LinearizedPoly};
use crate::poly::is_two_sided_inverse;
use crate::quad::{self, QuadCase, QuadParams};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub failures: usize,
    pub certificates: usize,
    pub inconsistent_certificates: usize,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.inconsistent_certificates == 0
    }
}

struct Runner<'w, W: Write + ?Sized> {
    out: &'w mut W,
    summary: Summary,
}

impl<W: Write + ?Sized> Runner<'_, W> {
    fn check(&mut self, name: &str, field: &FieldCtx, ok: bool) -> io::Result<()> {
        self.summary.checks += 1;
        if !ok {
            self.summary.failures += 1;
        }
        let line = json!({"check": name, "field": field.spec_string(), "ok": ok});
        writeln!(self.out, "{line}")
    }

    fn check_result(&mut self, name: &str, field: &FieldCtx, r: Result<bool>) -> io::Result<()> {
        self.check(name, field, r.unwrap_or(false))
    }

    fn certificate(&mut self, cert: &crate::PermutationCertificate) -> io::Result<()> {
        self.summary.certificates += 1;
        if !cert.is_consistent() {
            self.summary.inconsistent_certificates += 1;
        }
        writeln!(self.out, "{}", cert.to_json_line())
    }
}

fn field_laws(ctx: &FieldCtx) -> bool {
    let elems: Vec<Elem> = ctx.elements().collect();
    let step = (elems.len() / 40).max(1);
    let sample: Vec<Elem> = elems.iter().copied().step_by(step).collect();
    sample.iter().all(|&x| {
        sample.iter().all(|&y| {
            let distributes = sample
                .iter()
                .all(|&z| ctx.mul(x, ctx.add(y, z)) == ctx.add(ctx.mul(x, y), ctx.mul(x, z)));
            let frob = ctx.frobenius(ctx.mul(x, y), 1)
                == ctx.mul(ctx.frobenius(x, 1), ctx.frobenius(y, 1))
                && ctx.frobenius(ctx.add(x, y), 1)
                    == ctx.add(ctx.frobenius(x, 1), ctx.frobenius(y, 1));
            distributes && frob && ctx.add(x, ctx.neg(x)).is_zero()
        }) && (x.is_zero() || ctx.mul(x, ctx.inv(x).expect("nonzero")) == Elem::ONE)
    })
}

fn random_linearized(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> LinearizedPoly {
    let coeffs = (0..ctx.n())
        .map(|_| Elem(rng.gen_range(0..ctx.size()) as u32))
        .collect();
    LinearizedPoly::new(ctx, coeffs).expect("n coefficients")
}

/// Runs every check, writing one line each, and returns the tally.
pub fn run<W: Write + ?Sized>(out: &mut W) -> Result<Summary> {
    let mut r = Runner {
        out,
        summary: Summary::default(),
    };
    let io = |e: io::Error| crate::Error::Precondition(format!("write failed: {e}"));

    let f9 = make_field(3, 1, 2)?;
    let f16 = make_field(2, 2, 2)?;
    let f25 = make_field(5, 1, 2)?;
    let f27 = make_field(3, 1, 3)?;
    let f81 = make_field(3, 1, 4)?;

    for ctx in [&f9, &f16, &f25, &f27, &f81] {
        r.check(
            "field laws and Frobenius automorphism",
            ctx,
            field_laws(ctx),
        )
        .map_err(io)?;
    }

    // Linearized inverses and Dickson ranks.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for ctx in [&f9, &f27, &f25, &make_field(2, 1, 4)?] {
        let mut ok = true;
        for _ in 0..50 {
            let l = random_linearized(ctx, &mut rng);
            let singular = linalg::det(ctx, &dickson(ctx, &l)).is_zero();
            ok &= match linearized_inverse(ctx, &l) {
                Ok(inv) => !singular && is_two_sided_inverse(ctx, &l, &inv),
                Err(_) => singular,
            };
        }
        r.check("cofactor inverse of linearized permutations", ctx, ok)
            .map_err(io)?;
    }
    for ctx in [&f9, &f27] {
        let mut ok = true;
        for _ in 0..100 {
            let l = random_linearized(ctx, &mut rng);
            let d = dickson(ctx, &l);
            let rank = linalg::rank(ctx, &d);
            ok &= rank + l.kernel_dim(ctx) == ctx.n() as usize;
            if rank + 1 == ctx.n() as usize {
                ok &= linalg::all_row_subsets_independent(ctx, &d, rank);
            }
        }
        r.check("Dickson rank equals n minus kernel dimension", ctx, ok)
            .map_err(io)?;
    }

    // Quadratic family.
    let examples = [(Elem::ZERO, Elem::ONE, 2), (Elem::ONE, Elem::ONE, 2)];
    for (a, b, k) in examples {
        let p = QuadParams::new(&f9, a, b, k, QuadCase::A)?;
        r.certificate(&quad::criterion(&p)).map_err(io)?;
    }
    let g = f9.primitive_element();
    for k in [1, 3] {
        let p = QuadParams::case_b(&f9, g, k)?;
        r.certificate(&quad::criterion(&p)).map_err(io)?;
    }
    for ctx in [&f9, &f16, &f25] {
        let rows = quad::sweep(ctx, 2..=5);
        r.check(
            "quad criterion matches oracle and inverses validate",
            ctx,
            rows.iter().all(|x| x.consistent()),
        )
        .map_err(io)?;
        let commuting = quad::enumerate_instances(ctx, 2..=5)
            .iter()
            .all(quad::commuting_identity_holds);
        r.check("quad commuting identity", ctx, commuting)
            .map_err(io)?;
    }
    r.check(
        "(x^q - x)^(q-1) piecewise",
        &f9,
        quad::kernel_power_piecewise_holds(&f9),
    )
    .map_err(io)?;
    r.check_result(
        "h^-1(h(s)) = s on the trace kernel image",
        &f9,
        quad::h_inverse_holds(&f9, 3),
    )
    .map_err(io)?;

    // Complete permutation polynomial.
    for ctx in [&f27, &make_field(5, 1, 3)?] {
        let p = CppParams::new(ctx)?;
        r.certificate(&cpp::certify(&p)?).map_err(io)?;
        r.check("f = h o x^e1", ctx, cpp::h_factorization_holds(&p))
            .map_err(io)?;
        r.check_result(
            "f + x = g o x^e1 with cofactor inverse of g",
            ctx,
            cpp::g_factorization_holds(&p),
        )
        .map_err(io)?;
    }
    let all_q = (3..=101).step_by(2).all(cpp::exponent_identity_holds);
    r.check("w e1 = 1 mod q^3 - 1 for odd q <= 101", &f27, all_q)
        .map_err(io)?;
    let unique = f27
        .nonzero_elements()
        .all(|a| cpp::affine_root_unique_by_scan(&f27, a).unwrap_or(false));
    r.check("affine root formula is the unique root", &f27, unique)
        .map_err(io)?;

    // A^m + L family.
    let minus = f9.from_int(-1);
    let trace = LinearizedPoly::new(&f9, vec![Elem::ONE, Elem::ONE])?;
    for (b, m) in [(minus, 1), (Elem::ONE, 1), (minus, 2)] {
        let p = AmlParams::new(&f9, b, m, trace.clone())?;
        r.certificate(&aml::criterion(&p)).map_err(io)?;
    }
    for ctx in [&f9, &f27, &f25] {
        let ok = aml::enumerate_norm_one_b(ctx)
            .into_iter()
            .all(|b| aml::build_a(ctx, b).is_ok());
        r.check("A(x)^q = b^q A(x) for every norm-one b", ctx, ok)
            .map_err(io)?;
    }
    let rows = aml::sweep_exhaustive(&f9, 6);
    r.check(
        "aml criterion matches oracle, exhaustive",
        &f9,
        rows.iter().all(|x| x.consistent()),
    )
    .map_err(io)?;
    writeln!(
        r.out,
        "{}",
        json!({"joint_counts": JointCounts::tally(&rows), "field": f9.spec_string()})
    )
    .map_err(io)?;
    let rows = aml::sweep_sampled(&f27, 6, 200, 7);
    r.check(
        "aml criterion matches oracle, sampled",
        &f27,
        rows.iter().all(|x| x.consistent()),
    )
    .map_err(io)?;
    writeln!(
        r.out,
        "{}",
        json!({"joint_counts": JointCounts::tally(&rows), "field": f27.spec_string()})
    )
    .map_err(io)?;
    let mut ok = true;
    for ctx in [&f9, &f27] {
        for b in aml::enumerate_norm_one_b(ctx).into_iter().take(4) {
            for _ in 0..10 {
                let l = aml::random_singular_linearized(ctx, &mut rng);
                for m in [1, 2, 5] {
                    let p = AmlParams::new(ctx, b, m, l.clone())?;
                    ok &= aml::psi_identity_holds(&p) && aml::difference_identity_holds(&p);
                    ok &= aml::b_columns_match_dickson(ctx, p.a(), p.l());
                }
            }
        }
    }
    r.check("aml proof identities", &f27, ok).map_err(io)?;

    let summary = r.summary.clone();
    writeln!(r.out, "{}", json!({ "summary": summary })).map_err(io)?;
    Ok(summary)
}

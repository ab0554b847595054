//! Deterministic random-chart builder shared by the property and
//! acceptance suites.

use axk_core::chart::{Chart, ChartClass, ChartDifferential, Coefficients, HiddenExtension};
use axk_core::rep::Prime;
use axk_core::Status;

/// Small xorshift so chart shapes are reproducible from a single seed.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed | 1)
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform-ish in 0..bound (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Build a structurally valid chart: differential pairs with consistent
/// bidegrees and subgroup/image orders, loose classes, and one linear
/// extension chain in a fixed degree.
pub fn random_chart(seed: u64) -> Chart {
    let mut rng = Rng::new(seed);
    let p = Prime::new(if rng.below(2) == 0 { 2 } else { 3 }).unwrap();
    let subgroup_exp = 1 + rng.below(3) as u32;
    let coefficients = if rng.below(2) == 0 {
        Coefficients::Integral
    } else {
        Coefficients::ModPPower(1 + rng.below(3) as u32)
    };
    let max_exp = match coefficients {
        Coefficients::Integral => subgroup_exp,
        Coefficients::ModPPower(v) => subgroup_exp.min(v),
    };
    let lambda_shift = rng.below(5);

    let mut classes = Vec::new();
    let mut differentials = Vec::new();
    let mut extensions = Vec::new();

    let status = |rng: &mut Rng| {
        if rng.below(4) == 0 {
            Status::Conjectural
        } else {
            Status::Proven
        }
    };

    for idx in 0..rng.below(7) {
        let page = 2 + rng.below(14) as u32;
        let src_filtration = rng.range_i64(-15, 15);
        let src_degree = match coefficients {
            Coefficients::Integral => 2 * rng.range_i64(-5, 5),
            Coefficients::ModPPower(_) => rng.range_i64(-10, 10),
        };
        let a = 1 + rng.below(u64::from(max_exp)) as u32;
        let j = rng.below(u64::from(a)) as u32;
        let l = 1 + rng.below(u64::from(a - j)) as u32;
        let b = l + rng.below(u64::from(max_exp - l + 1)) as u32;
        classes.push(ChartClass {
            name: format!("src {idx}"),
            filtration: src_filtration,
            degree: src_degree,
            order_exp: a,
            status: status(&mut rng),
        });
        classes.push(ChartClass {
            name: format!("tgt {idx}"),
            filtration: src_filtration - i64::from(page),
            degree: src_degree - 1,
            order_exp: b,
            status: status(&mut rng),
        });
        differentials.push(ChartDifferential {
            page,
            source: format!("src {idx}"),
            source_mult_exp: j,
            target: format!("tgt {idx}"),
            image_exp: l,
            status: status(&mut rng),
        });
    }

    for idx in 0..rng.below(5) {
        classes.push(ChartClass {
            name: format!("loose {idx}"),
            filtration: rng.range_i64(-20, 20),
            degree: rng.range_i64(-10, 10),
            order_exp: 1 + rng.below(u64::from(max_exp)) as u32,
            status: status(&mut rng),
        });
    }

    let chain_len = rng.below(4);
    let chain_degree = rng.range_i64(-10, 10);
    for idx in 0..chain_len {
        classes.push(ChartClass {
            name: format!("chain {idx}"),
            filtration: rng.range_i64(-20, 20),
            degree: chain_degree,
            order_exp: 1 + rng.below(u64::from(max_exp)) as u32,
            status: status(&mut rng),
        });
        if idx > 0 {
            extensions.push(HiddenExtension {
                lower: format!("chain {}", idx - 1),
                upper: format!("chain {idx}"),
                status: status(&mut rng),
            });
        }
    }

    let chart = Chart {
        name: format!("random-{seed}"),
        p,
        subgroup_exp,
        coefficients,
        lambda_shift,
        truncation_default: None,
        notes: vec![format!("generated from seed {seed}")],
        classes,
        differentials,
        extensions,
    };
    assert_eq!(chart.validate(), Ok(()), "builder must produce valid charts");
    chart
}

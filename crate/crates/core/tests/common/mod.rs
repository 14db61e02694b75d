//! Shared oracles and reference data for the integration tests.
#![allow(dead_code)]
// Table entries are kept digit for digit as published.
#![allow(clippy::excessive_precision)]

use std::f64::consts::TAU;

use hbcycle::hbsystem::{layout, HarmonicSolution, ResidualSystem};
use hbcycle::TrigPolynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Published h = 35 cycle: period, initial state and (cos, sin) amplitudes.
pub const PERIOD: f64 = 1.558652210;
pub const INITIAL_STATE: [f64; 3] = [-2.147367631, 2.078048211, 27.0];
pub const CONSTANTS: [f64; 3] = [0.0, 0.0, 23.04210397942006];

pub const X1: [(f64, f64); 35] = [
    (-5.780478259196228, 8.56017654325353),
    (0.0, 0.0),
    (3.160762628380509, 2.239212141102876),
    (0.0, 0.0),
    (0.6958870387616096, -0.7979388979225431),
    (0.0, 0.0),
    (-0.1891992374027477, -0.1864921358925765),
    (0.0, 0.0),
    (-0.04770429623010056, 0.04554044367245914),
    (0.0, 0.0),
    (0.01112322884679491, 0.01209138588669679),
    (0.0, 0.0),
    (0.003061207095371694, -0.002735092350544739),
    (0.0, 0.0),
    (-6.744578887916229e-4, -7.748319471034087e-4),
    (0.0, 0.0),
    (-1.960718247379475e-4, 1.665584161919807e-4),
    (0.0, 0.0),
    (4.116738805347028e-5, 4.960493476144467e-5),
    (0.0, 0.0),
    (1.254757391175977e-5, -1.018054283421179e-5),
    (0.0, 0.0),
    (-2.518375902000733e-6, -3.173486439630506e-6),
    (0.0, 0.0),
    (-8.025338211960923e-7, 6.230623750431923e-7),
    (0.0, 0.0),
    (1.541534734542893e-7, 2.0292802821633e-7),
    (0.0, 0.0),
    (5.130649139299358e-8, -3.813725452268523e-8),
    (0.0, 0.0),
    (-9.43393531993558e-9, -1.297038481588497e-8),
    (0.0, 0.0),
    (-3.278552746800046e-9, 2.333260259021725e-9),
    (0.0, 0.0),
    (5.76957885768651e-10, 8.28626640138045e-10),
];

pub const X2: [(f64, f64); 35] = [
    (-2.32972926505593, 10.89038310357172),
    (0.0, 0.0),
    (5.86875317198698, -1.5832552129833),
    (0.0, 0.0),
    (-0.9124249133801483, -2.200556873678218),
    (0.0, 0.0),
    (-0.7154457265566421, 0.3473932955614448),
    (0.0, 0.0),
    (0.1175186702136983, 0.2186139734768588),
    (0.0, 0.0),
    (0.06473984670858603, -0.03723215039412078),
    (0.0, 0.0),
    (-0.01127208646321726, -0.01877739524860192),
    (0.0, 0.0),
    (-0.005359671824365359, 0.003303445299126894),
    (0.0, 0.0),
    (9.453499475830811e-4, 0.001510235036151227),
    (0.0, 0.0),
    (4.211022386354685e-4, -2.657049331814368e-4),
    (0.0, 0.0),
    (-7.363528144366622e-5, -1.164013765469982e-4),
    (0.0, 0.0),
    (-3.19419300699788e-5, 2.017609175377016e-5),
    (0.0, 0.0),
    (5.47663534401654e-6, 8.710929378319451e-6),
    (0.0, 0.0),
    (2.362852034076972e-6, -1.474901091428546e-6),
    (0.0, 0.0),
    (-3.94532524722541e-7, -6.379296603810031e-7),
    (0.0, 0.0),
    (-1.715198229248314e-7, 1.049218598356554e-7),
    (0.0, 0.0),
    (2.776045093375681e-8, 4.59473450493284e-8),
    (0.0, 0.0),
    (1.22681173575872e-8, -7.31171826830086e-9),
];

pub const X3: [(f64, f64); 35] = [
    (0.0, 0.0),
    (7.568410271550653, -9.50386584559212),
    (0.0, 0.0),
    (-3.555327211552558, -1.844710563805469),
    (0.0, 0.0),
    (-0.4741220131932616, 1.279043179069961),
    (0.0, 0.0),
    (0.4227292179138024, 0.1274574086305204),
    (0.0, 0.0),
    (0.03498415351761577, -0.1315337800809524),
    (0.0, 0.0),
    (-0.03934013541135439, -0.009645786231708874),
    (0.0, 0.0),
    (-0.002660052258813564, 0.01145537653603837),
    (0.0, 0.0),
    (0.003271688724557337, 7.33752523103949e-4),
    (0.0, 0.0),
    (2.024982256871223e-4, -9.206266886554897e-4),
    (0.0, 0.0),
    (-2.560063570343799e-4, -5.58964460662525e-5),
    (0.0, 0.0),
    (-1.542436654918173e-5, 7.050327849098175e-5),
    (0.0, 0.0),
    (1.926014222030195e-5, 4.25261452471065e-6),
    (0.0, 0.0),
    (1.170939944189529e-6, -5.225643926851625e-6),
    (0.0, 0.0),
    (-1.409525591131397e-6, -3.21879984959824e-7),
    (0.0, 0.0),
    (-8.83134288999026e-8, 3.782652721710986e-7),
    (0.0, 0.0),
    (1.010610960272394e-7, 2.418021923473667e-8),
    (0.0, 0.0),
    (6.606163280924149e-9, -2.689431432873997e-8),
    (0.0, 0.0),
];
pub fn tables() -> [&'static [(f64, f64); 35]; 3] {
    [&X1, &X2, &X3]
}

pub fn reference_solution() -> HarmonicSolution {
    let poly = |k: usize| TrigPolynomial {
        a0: CONSTANTS[k],
        a: tables()[k].iter().map(|p| p.0).collect(),
        b: tables()[k].iter().map(|p| p.1).collect(),
    };
    HarmonicSolution {
        omega: TAU / PERIOD,
        x: [poly(0), poly(1), poly(2)],
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_poly(rng: &mut ChaCha8Rng, h: usize) -> TrigPolynomial {
    TrigPolynomial {
        a0: rng.gen_range(-3.0..3.0),
        a: random_vec(rng, h, 3.0),
        b: random_vec(rng, h, 3.0),
    }
}

/// Projection of the pointwise product onto `1, cos(i t), sin(i t)` by the
/// trapezoidal rule, exact for trigonometric polynomials of this degree.
pub fn quadrature_product(p: &TrigPolynomial, q: &TrigPolynomial, h_out: usize) -> TrigPolynomial {
    let n = 8 * (p.h() + q.h() + h_out) + 16;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let theta = TAU * j as f64 / n as f64;
            (theta, p.evaluate(1.0, theta) * q.evaluate(1.0, theta))
        })
        .collect();
    let proj = |f: &dyn Fn(f64) -> f64, w: f64| {
        samples.iter().map(|&(t, v)| v * f(t)).sum::<f64>() * w / n as f64
    };
    TrigPolynomial {
        a0: proj(&|_| 1.0, 1.0),
        a: (1..=h_out)
            .map(|i| proj(&|t| (i as f64 * t).cos(), 2.0))
            .collect(),
        b: (1..=h_out)
            .map(|i| proj(&|t| (i as f64 * t).sin(), 2.0))
            .collect(),
    }
}

/// Central differences with step `1e-6 * max(1, |u_k|)`; column-major.
pub fn fd_jacobian(sys: &ResidualSystem, u: &[f64]) -> Vec<Vec<f64>> {
    (0..u.len())
        .map(|k| {
            let step = 1e-6 * u[k].abs().max(1.0);
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[k] += step;
            dn[k] -= step;
            let fu = sys.residual(&up).unwrap();
            let fd = sys.residual(&dn).unwrap();
            fu.iter()
                .zip(&fd)
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect()
        })
        .collect()
}

/// The sixteen h = 2 equations for sigma = 10, r = 28, b = 8/3, anchor 27,
/// written out term by term in the displayed order: for each coordinate
/// cos 1, sin 1, cos 2, sin 2, constant; anchor last.
pub fn h2_equations(u: &[f64]) -> [f64; 16] {
    let h = 2;
    let w = u[layout::OMEGA];
    let (x10, x20, x30) = (u[1], u[2], u[3]);
    let c = |k: usize, i: usize| u[layout::cos(h, k - 1, i)];
    let s = |k: usize, i: usize| u[layout::sin(h, k - 1, i)];
    let (c11, c12, s11, s12) = (c(1, 1), c(1, 2), s(1, 1), s(1, 2));
    let (c21, c22, s21, s22) = (c(2, 1), c(2, 2), s(2, 1), s(2, 2));
    let (c31, c32, s31, s32) = (c(3, 1), c(3, 2), s(3, 1), s(3, 2));
    [
        w * s11 - 10.0 * c21 + 10.0 * c11,
        -10.0 * s21 + 10.0 * s11 - c11 * w,
        2.0 * w * s12 - 10.0 * c22 + 10.0 * c12,
        -10.0 * s22 + 10.0 * s12 - 2.0 * c12 * w,
        10.0 * x10 - 10.0 * x20,
        c11 * x30
            + c31 * x10
            + s11 * s32 / 2.0
            + s12 * s31 / 2.0
            + w * s21
            + c11 * c32 / 2.0
            + c12 * c31 / 2.0
            + c21
            - 28.0 * c11,
        s11 * x30 + s31 * x10 + c11 * s32 / 2.0 - c12 * s31 / 2.0 + s21 + c31 * s12 / 2.0
            - c32 * s11 / 2.0
            - 28.0 * s11
            - c21 * w,
        c12 * x30 + c32 * x10 - s11 * s31 / 2.0 + 2.0 * w * s22 + c11 * c31 / 2.0 + c22
            - 28.0 * c12,
        s12 * x30 + s32 * x10 + c11 * s31 / 2.0 + s22 - 28.0 * s12 + c31 * s11 / 2.0
            - 2.0 * c22 * w,
        x10 * x30 + x20 - 28.0 * x10
            + s12 * s32 / 2.0
            + s11 * s31 / 2.0
            + c12 * c32 / 2.0
            + c11 * c31 / 2.0,
        -c11 * x20 - c21 * x10 + w * s31 - s11 * s22 / 2.0 - s12 * s21 / 2.0 + 8.0 * c31 / 3.0
            - c11 * c22 / 2.0
            - c12 * c21 / 2.0,
        -s11 * x20 - s21 * x10 + 8.0 * s31 / 3.0 - c11 * s22 / 2.0 + c12 * s21 / 2.0
            - c21 * s12 / 2.0
            + c22 * s11 / 2.0
            - c31 * w,
        -c12 * x20 - c22 * x10 + 2.0 * w * s32 + s11 * s21 / 2.0 + 8.0 * c32 / 3.0
            - c11 * c21 / 2.0,
        -s12 * x20 - s22 * x10 + 8.0 * s32 / 3.0
            - c11 * s21 / 2.0
            - c21 * s11 / 2.0
            - 2.0 * c32 * w,
        8.0 * x30 / 3.0
            - x10 * x20
            - s12 * s22 / 2.0
            - s11 * s21 / 2.0
            - c12 * c22 / 2.0
            - c11 * c21 / 2.0,
        x30 + c31 + c32 - 27.0,
    ]
}

/// Row of the residual vector holding displayed h = 2 equation `j`.
pub fn h2_row(j: usize) -> usize {
    let h = 2;
    if j == 15 {
        return layout::anchor_row(h);
    }
    let (k, slot) = (j / 5, j % 5);
    match slot {
        0 => layout::cos_row(h, k, 1),
        1 => layout::sin_row(h, k, 1),
        2 => layout::cos_row(h, k, 2),
        3 => layout::sin_row(h, k, 2),
        _ => layout::constant_row(h, k),
    }
}

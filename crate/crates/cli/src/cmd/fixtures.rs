//! Inventory of built-in fixtures and where their reference values come from.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub module: &'static str,
    pub reference: &'static str,
    pub justification: &'static str,
}

pub fn inventory() -> Vec<Fixture> {
    let f = |name, module, reference, justification| Fixture { name, module, reference, justification };
    vec![
        f("gaussian(mu, s2)", "mgf", "Lambda(p) = mu + s2 p / 2", "log-MGF of a Gaussian; second differences vanish"),
        f("pushforward(z^2)", "mgf", "Lambda(p) = -log(1 - 2p) / (2p), p < 1/2", "chi-squared(1) MGF (1 - 2p)^(-1/2)"),
        f("exponential(1)", "transport", "T(t) = Phi^-1(1 - e^-t), concave", "closed-form CDF; equals -Phi^-1(e^-t)"),
        f("poisson(1) samples", "transport", "T not concave", "lattice law; empirical CDF is a step function"),
        f("translation(a)", "renyi", "D_alpha = alpha |a|^2 / 2", "Gaussian shift; equality in D_beta <= (beta/alpha) D_alpha"),
        f(
            "gaussian_scale(s2)",
            "renyi",
            "D_alpha = -(log(alpha + (1 - alpha) s2) + (alpha - 1) log s2) / (2 (alpha - 1))",
            "direct Gaussian integral",
        ),
        f("orthant(n)", "conic", "Binomial(n, 1/2)", "coordinates of Z project independently onto R_+"),
        f("orthant(n) MGF", "conic", "E e^(eta V) = ((1 + e^eta) / 2)^n", "binomial MGF"),
        f("subspace(n, d)", "conic", "v_d = 1", "projection onto a subspace always lands on the whole subspace"),
        f("segment [0, a]", "wills", "V = (1, a), W = 1 + a", "Steiner: length of [0, a] + lambda B_1 is a + 2 lambda"),
        f("ball(r, n)", "wills", "V_j = C(n, j) omega_n r^j / omega_(n-j)", "Steiner expansion of omega_n (r + lambda)^n"),
        f("box(a_1..a_n)", "wills", "V_i = e_i(a_1..a_n)", "elementary symmetric polynomials of the side lengths"),
        f("e^x - e^(2x)", "expsum", "one zero at 0", "e^x (1 - e^x)"),
        f("1 - 2e^x + e^(2x)", "expsum", "one tangential zero at 0", "(e^x - 1)^2"),
        f("(e^x - 1)(e^x - 2)(e^x - 3)", "expsum", "zeros 0, log 2, log 3", "factorization"),
        f("fit (-1, 0, 1) at (-1, 1)", "expsum", "c0 = c1 = -1 / (e + 1/e)", "symmetric 2x2 solve"),
    ]
}

pub fn inventory_json() -> Value {
    json!({ "fixtures": inventory() })
}

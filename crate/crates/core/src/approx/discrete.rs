//! Binomial and Poisson masses and tails used by the BA/PA approximations and
//! the total-variation diagnostics.

/// Above this many trials binomial coefficients are taken in log space.
const EXACT_COEFF_MAX_N: usize = 50;

/// PMF of `Bin(n, p)` over `0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut mass = vec![0.0; n + 1];
    if p <= 0.0 {
        mass[0] = 1.0;
        return mass;
    }
    if p >= 1.0 {
        mass[n] = 1.0;
        return mass;
    }
    let q = 1.0 - p;
    if n <= EXACT_COEFF_MAX_N {
        let mut coeff: u64 = 1;
        for (k, m) in mass.iter_mut().enumerate() {
            if k > 0 {
                coeff = coeff * (n - k + 1) as u64 / k as u64;
            }
            *m = coeff as f64 * p.powi(k as i32) * q.powi((n - k) as i32);
        }
    } else {
        let (ln_p, ln_q) = (p.ln(), q.ln());
        let ln_n_fact = libm::lgamma(n as f64 + 1.0);
        for (k, m) in mass.iter_mut().enumerate() {
            let ln_coeff =
                ln_n_fact - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
            *m = (ln_coeff + k as f64 * ln_p + (n - k) as f64 * ln_q).exp();
        }
    }
    mass
}

/// `P(Y >= threshold)` for `Y ~ Bin(n, p)`.
pub fn binomial_upper_tail(n: usize, p: f64, threshold: usize) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if threshold > n {
        return 0.0;
    }
    let mass = binomial_pmf(n, p);
    // Sum whichever side of the split is lighter.
    let tail = if (threshold as f64) > n as f64 * p {
        mass[threshold..].iter().sum::<f64>()
    } else {
        1.0 - mass[..threshold].iter().sum::<f64>()
    };
    tail.clamp(0.0, 1.0)
}

/// `e^{-mu} mu^m / m!`.
pub fn poisson_mass(mu: f64, m: usize) -> f64 {
    if mu == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (m as f64 * mu.ln() - mu - libm::lgamma(m as f64 + 1.0)).exp()
}

/// `P(Z >= threshold)` for `Z ~ Pois(mu)`.
pub fn poisson_upper_tail(mu: f64, threshold: usize) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if mu == 0.0 {
        return 0.0;
    }
    if threshold == 1 {
        return -(-mu).exp_m1();
    }
    let tail = if (threshold as f64) > mu {
        // Terms decrease monotonically past the mode.
        let mut term = poisson_mass(mu, threshold);
        let mut sum = 0.0;
        let mut m = threshold;
        while term > 0.0 && term > sum * 1e-17 {
            sum += term;
            m += 1;
            term *= mu / m as f64;
        }
        sum
    } else {
        let mut term = poisson_mass(mu, 0);
        let mut lower = 0.0;
        for m in 0..threshold {
            if m > 0 {
                term = if term > 0.0 { term * mu / m as f64 } else { poisson_mass(mu, m) };
            }
            lower += term;
        }
        1.0 - lower
    };
    tail.clamp(0.0, 1.0)
}

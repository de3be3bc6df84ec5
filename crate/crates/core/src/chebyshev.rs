//! Chebyshev polynomials of the second kind, `U_n(a)`.
//!
//! Inside `[-1, 1]` the three-term recurrence is used. Outside, where the
//! recurrence amplifies rounding at large `n`, the hyperbolic closed form
//! `sinh((n+1)θ)/sinh(θ)` with `θ = arccosh|a|` is used instead.
//!
//! Negative orders follow the recurrence run backwards: `U_{-1} = 0`,
//! `U_{-2} = -1`, and in general `U_{-n} = -U_{n-2}`.

/// `U_n(a)` via the three-term recurrence only.
pub fn u_recurrence(n: i64, a: f64) -> f64 {
    if n < 0 {
        return negative_order(n, a, u_recurrence);
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * a * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_n(a)` for `|a| <= 1` via `sin((n+1)φ)/sin(φ)`, `φ = arccos a`.
pub fn u_trigonometric(n: i64, a: f64) -> f64 {
    if n < 0 {
        return negative_order(n, a, u_trigonometric);
    }
    let phi = a.clamp(-1.0, 1.0).acos();
    let s = phi.sin();
    if s.abs() < 1e-12 {
        // limit at a = ±1
        let sign = if a < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        return sign * (n + 1) as f64;
    }
    ((n + 1) as f64 * phi).sin() / s
}

/// `U_n(a)` for `|a| > 1` via the hyperbolic form.
pub fn u_hyperbolic(n: i64, a: f64) -> f64 {
    if n < 0 {
        return negative_order(n, a, u_hyperbolic);
    }
    let theta = a.abs().acosh();
    let magnitude = if theta == 0.0 {
        (n + 1) as f64
    } else {
        ((n + 1) as f64 * theta).sinh() / theta.sinh()
    };
    if a < 0.0 && n % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// `U_n(a)`, choosing the stable evaluation route for the argument.
pub fn u(n: i64, a: f64) -> f64 {
    if a.abs() <= 1.0 {
        u_recurrence(n, a)
    } else {
        u_hyperbolic(n, a)
    }
}

/// First derivative `U_n'(a)`, from differentiating the recurrence.
pub fn u_derivative(n: i64, a: f64) -> f64 {
    if n <= 0 {
        return 0.0;
    }
    let (mut u_prev, mut u_cur) = (0.0, 1.0);
    let (mut d_prev, mut d_cur) = (0.0, 0.0);
    for _ in 0..n {
        let u_next = 2.0 * a * u_cur - u_prev;
        let d_next = 2.0 * u_cur + 2.0 * a * d_cur - d_prev;
        u_prev = u_cur;
        u_cur = u_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    d_cur
}

fn negative_order(n: i64, a: f64, f: fn(i64, f64) -> f64) -> f64 {
    match n {
        -1 => 0.0,
        _ => -f(-n - 2, a),
    }
}

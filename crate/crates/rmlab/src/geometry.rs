//! The geometric non-MRD obstruction: the plane curve over F_{q^{n/2}}
//! attached to a norm class, witness extraction, its normal-basis
//! expansion to a system W of four quadrics over F_q, the projectively
//! equivalent system V over F_{q^4}, point enumeration, and the
//! Hasse-Weil / Cafure-Matera bound calculators.

use crate::error::{Error, Result};
use crate::fields::FieldContext;
use crate::linpoly::FqBasis;

/// Parameters of the curve
/// -(S^{q^s}-S)^2 + ηZ^2 + η^{q^s}Z^{2q^s} - 2βη^{(q^s+1)/2}Z^{q^s+1} = 0
/// over F_{q^{n/2}}. All encodings live at level n/2.
#[derive(Debug, Clone)]
pub struct CurveParams {
    pub s: usize,
    /// subfield level n/2
    pub half: usize,
    /// N_{q^n/q^{n/2}}(δ) when the curve comes from a code
    pub alpha: Option<u64>,
    /// ε as a field encoding: 1 or -1
    pub epsilon: u64,
    pub beta: u64,
    /// non-square at level n/2
    pub eta: u64,
}

/// β = ε(α+1)/(1-α); undefined at α = 1.
pub fn beta_from_alpha(ctx: &FieldContext, alpha: u64, eps_positive: bool) -> Result<u64> {
    if alpha == 1 {
        return Err(Error::InvalidParameter("beta has a pole at alpha = 1".into()));
    }
    let num = ctx.add_raw(alpha, 1);
    let den = ctx.sub_raw(1, alpha);
    let b = ctx.mul_raw(num, ctx.inv_raw(den)?);
    Ok(if eps_positive { b } else { ctx.neg_raw(b) })
}

impl CurveParams {
    pub fn from_alpha(
        ctx: &FieldContext,
        alpha: u64,
        s: usize,
        eps_positive: bool,
    ) -> Result<CurveParams> {
        if ctx.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if ctx.n() % 2 != 0 {
            return Err(Error::InvalidParameter("curve needs even n".into()));
        }
        let half = ctx.n() / 2;
        if alpha == 0 || half % ctx.level_raw(alpha) != 0 {
            return Err(Error::InvalidParameter(format!(
                "alpha encoding {alpha} is not a nonzero norm value in the half field"
            )));
        }
        let beta = beta_from_alpha(ctx, alpha, eps_positive)?;
        let eta = ctx.find_nonsquare(half)?.encoding();
        Ok(CurveParams {
            s,
            half,
            alpha: Some(alpha),
            epsilon: if eps_positive { 1 } else { ctx.neg_raw(1) },
            beta,
            eta,
        })
    }

    /// Direct construction from β (dimension-witness experiments).
    pub fn from_beta(ctx: &FieldContext, beta: u64, s: usize) -> Result<CurveParams> {
        if ctx.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let half = ctx.n() / 2;
        if half % ctx.level_raw(beta.max(1)) != 0 {
            return Err(Error::InvalidParameter(format!(
                "beta encoding {beta} lies outside the half field"
            )));
        }
        let eta = ctx.find_nonsquare(half)?.encoding();
        Ok(CurveParams { s, half, alpha: None, epsilon: 1, beta, eta })
    }

    pub fn with_eta(mut self, eta: u64) -> CurveParams {
        self.eta = eta;
        self
    }

    /// Left-hand side of the curve equation at (S, Z).
    pub fn eval(&self, ctx: &FieldContext, s_val: u64, z_val: u64) -> u64 {
        let qs = (ctx.level_size(1) as u128).pow(self.s as u32);
        let d = ctx.sub_raw(ctx.pow_raw(s_val, qs), s_val);
        let t1 = ctx.neg_raw(ctx.mul_raw(d, d));
        let t2 = ctx.mul_raw(self.eta, ctx.mul_raw(z_val, z_val));
        let zqs = ctx.pow_raw(z_val, qs);
        let t3 = ctx.mul_raw(ctx.pow_raw(self.eta, qs), ctx.mul_raw(zqs, zqs));
        let coef = ctx.mul_raw(
            ctx.mul_raw(2 % ctx.p(), self.beta),
            ctx.pow_raw(self.eta, (qs + 1) / 2),
        );
        let t4 = ctx.neg_raw(ctx.mul_raw(coef, ctx.mul_raw(zqs, z_val)));
        ctx.add_raw(ctx.add_raw(t1, t2), ctx.add_raw(t3, t4))
    }
}

/// Affine F_{q^{n/2}}-points of the curve, in encoding order.
pub fn curve_points(
    ctx: &FieldContext,
    params: &CurveParams,
    z_nonzero_only: bool,
) -> Result<Vec<(u64, u64)>> {
    let elems = ctx.subfield_elements(params.half)?;
    let mut out = Vec::new();
    for &s_val in &elems {
        for &z_val in &elems {
            if z_nonzero_only && z_val == 0 {
                continue;
            }
            if params.eval(ctx, s_val, z_val) == 0 {
                out.push((s_val, z_val));
            }
        }
    }
    Ok(out)
}

/// A certified solution (T, S, A, B) of the non-MRD criterion.
#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub t: u64,
    pub s: u64,
    pub a: u64,
    pub b: u64,
    /// Δ = S^2 + 4T, a non-square
    pub delta: u64,
}

/// Builds the witness from a curve point with Z ≠ 0 and verifies all four
/// defining conditions plus irreducibility of X^2 - SX - T. A failure here
/// means an implementation bug, not bad input, hence the error.
pub fn witness_from_point(
    ctx: &FieldContext,
    params: &CurveParams,
    point: (u64, u64),
) -> Result<Witness> {
    let (sb, zb) = point;
    if zb == 0 {
        return Err(Error::InvalidParameter("witness needs Z != 0".into()));
    }
    if params.eval(ctx, sb, zb) != 0 {
        return Err(Error::InvalidParameter("point not on the curve".into()));
    }
    let alpha = params
        .alpha
        .ok_or_else(|| Error::InvalidParameter("witness needs a source alpha".into()))?;
    let qs = (ctx.level_size(1) as u128).pow(params.s as u32);
    let inv2 = ctx.inv_raw(2 % ctx.p())?;
    let inv4 = ctx.mul_raw(inv2, inv2);

    let delta = ctx.mul_raw(params.eta, ctx.mul_raw(zb, zb));
    let t = ctx.mul_raw(ctx.sub_raw(delta, ctx.mul_raw(sb, sb)), inv4);
    let dpow = ctx.pow_raw(delta, (qs - 1) / 2);
    let b = ctx.mul_raw(params.epsilon, dpow);
    let s_qs = ctx.pow_raw(sb, qs);
    let a = ctx.mul_raw(
        inv2,
        ctx.sub_raw(s_qs, ctx.mul_raw(params.epsilon, ctx.mul_raw(sb, dpow))),
    );

    // (i) (1-α)(T+T^{q^s}) - α S^{q^s+1} + (1+α)(AS - 2BT) = 0
    let t_qs = ctx.pow_raw(t, qs);
    let c1 = ctx.mul_raw(ctx.sub_raw(1, alpha), ctx.add_raw(t, t_qs));
    let c2 = ctx.mul_raw(alpha, ctx.mul_raw(s_qs, sb));
    let two_bt = ctx.mul_raw(2 % ctx.p(), ctx.mul_raw(b, t));
    let c3 = ctx.mul_raw(
        ctx.add_raw(1, alpha),
        ctx.sub_raw(ctx.mul_raw(a, sb), two_bt),
    );
    if ctx.add_raw(ctx.sub_raw(c1, c2), c3) != 0 {
        return Err(Error::InvalidParameter("witness condition (i) failed".into()));
    }
    // (ii) X^2 - SX - T irreducible <=> Δ = S^2 + 4T non-square
    let delta_check = ctx.add_raw(ctx.mul_raw(sb, sb), ctx.mul_raw(4 % ctx.p(), t));
    if delta_check != delta || ctx.is_square_raw(delta, params.half)? {
        return Err(Error::InvalidParameter("witness condition (ii) failed".into()));
    }
    // (iii) S^{q^s} = 2A + BS
    if s_qs != ctx.add_raw(ctx.mul_raw(2 % ctx.p(), a), ctx.mul_raw(b, sb)) {
        return Err(Error::InvalidParameter("witness condition (iii) failed".into()));
    }
    // (iv) -T^{q^s} = A^2 + B(AS - BT)
    let rhs = ctx.add_raw(
        ctx.mul_raw(a, a),
        ctx.mul_raw(b, ctx.sub_raw(ctx.mul_raw(a, sb), ctx.mul_raw(b, t))),
    );
    if ctx.neg_raw(t_qs) != rhs {
        return Err(Error::InvalidParameter("witness condition (iv) failed".into()));
    }
    Ok(Witness { t, s: sb, a, b, delta })
}

/// Four homogeneous quadrics in 8 variables, each as a symmetric 8x8
/// matrix of encodings at `level`.
#[derive(Debug, Clone)]
pub struct QuadraticFormSystem {
    pub level: usize,
    pub labels: [&'static str; 8],
    /// four row-major 8x8 symmetric matrices
    pub forms: Vec<Vec<u64>>,
}

impl QuadraticFormSystem {
    /// v^T M v for form `k`.
    pub fn eval(&self, ctx: &FieldContext, k: usize, v: &[u64; 8]) -> u64 {
        let m = &self.forms[k];
        let mut acc = 0u64;
        for i in 0..8 {
            if v[i] == 0 {
                continue;
            }
            let mut row = 0u64;
            for j in 0..8 {
                if v[j] != 0 && m[i * 8 + j] != 0 {
                    row = ctx.add_raw(row, ctx.mul_raw(m[i * 8 + j], v[j]));
                }
            }
            acc = ctx.add_raw(acc, ctx.mul_raw(v[i], row));
        }
        acc
    }

    pub fn vanishes_at(&self, ctx: &FieldContext, v: &[u64; 8]) -> bool {
        (0..self.forms.len()).all(|k| self.eval(ctx, k, v) == 0)
    }
}

const W_LABELS: [&str; 8] = ["S0", "S1", "S2", "S3", "Z0", "Z1", "Z2", "Z3"];
const V_LABELS: [&str; 8] = ["W0", "W1", "W2", "X3", "Y0", "Y1", "Y2", "Y3"];

/// (S, Z) from W-coordinates through the normal basis.
pub fn lift_point(ctx: &FieldContext, basis: &FqBasis, v: &[u64; 8]) -> (u64, u64) {
    let s_val = basis.combine(ctx, &v[0..4]);
    let z_val = basis.combine(ctx, &v[4..8]);
    (s_val, z_val)
}

/// Expands the curve's quadratic map in the normal basis {ξ, ξ^q, ξ^{q^2},
/// ξ^{q^3}} of F_{q^4}/F_q by polarization, giving the system W over F_q.
pub fn build_variety_w(
    ctx: &FieldContext,
    params: &CurveParams,
    basis: &FqBasis,
) -> Result<QuadraticFormSystem> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if ctx.n() != 8 || basis.len() != 4 {
        return Err(Error::InvalidParameter("variety W needs n = 8".into()));
    }
    let q_of = |v: &[u64; 8]| {
        let (s_val, z_val) = lift_point(ctx, basis, v);
        params.eval(ctx, s_val, z_val)
    };
    let inv2 = ctx.inv_raw(2 % ctx.p())?;
    // symmetric matrix over F_{q^4}: diagonal Q(e_i), off-diagonal the
    // polarized bilinear form B(e_i,e_j) = (Q(e_i+e_j) - Q(e_i) - Q(e_j))/2
    let mut diag = [0u64; 8];
    for (i, d) in diag.iter_mut().enumerate() {
        let mut v = [0u64; 8];
        v[i] = 1;
        *d = q_of(&v);
    }
    let mut big = vec![0u64; 64];
    for i in 0..8 {
        big[i * 8 + i] = diag[i];
        for j in i + 1..8 {
            let mut v = [0u64; 8];
            v[i] = 1;
            v[j] = 1;
            let b = ctx.mul_raw(
                ctx.sub_raw(ctx.sub_raw(q_of(&v), diag[i]), diag[j]),
                inv2,
            );
            big[i * 8 + j] = b;
            big[j * 8 + i] = b;
        }
    }
    // f_k = coordinate k of each entry in the normal basis
    let mut forms = vec![vec![0u64; 64]; 4];
    let mut coords = [0u64; 4];
    for idx in 0..64 {
        basis.decompose_into(ctx, big[idx], &mut coords);
        for k in 0..4 {
            forms[k][idx] = coords[k];
        }
    }
    Ok(QuadraticFormSystem { level: 1, labels: W_LABELS, forms })
}

/// A projective point of W with its Z_3 ≠ 0 flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WPoint {
    pub coords: [u64; 8],
    pub z3_nonzero: bool,
}

/// All points of P^7(F_q) on the four quadrics, normalized to leading
/// coordinate 1, in lexicographic encoding order.
pub fn enumerate_w(ctx: &FieldContext, system: &QuadraticFormSystem) -> Result<Vec<WPoint>> {
    let fq = ctx.subfield_elements(1)?;
    let mut out = Vec::new();
    let mut v = [0u64; 8];
    for lead in 0..8 {
        // leading coordinate 1, earlier coordinates 0
        let free = 7 - lead;
        let total = (fq.len() as u64).pow(free as u32);
        for mut idx in 0..total {
            v = [0u64; 8];
            v[lead] = 1;
            for slot in (lead + 1..8).rev() {
                v[slot] = fq[(idx % fq.len() as u64) as usize];
                idx /= fq.len() as u64;
            }
            if system.vanishes_at(ctx, &v) {
                out.push(WPoint { coords: v, z3_nonzero: v[7] != 0 });
            }
        }
    }
    let _ = v;
    Ok(out)
}

/// The system V over F_{q^4} in coordinates (W0:W1:W2:X3:Y0:Y1:Y2:Y3):
/// W_i^2 (and (W0+W1+W2)^2) against the η/β quadrics in Y.
pub fn build_variety_v(ctx: &FieldContext, params: &CurveParams) -> Result<QuadraticFormSystem> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if ctx.n() != 8 {
        return Err(Error::InvalidParameter("variety V needs n = 8".into()));
    }
    let q = ctx.level_size(1) as u128;
    let eta = params.eta;
    let beta = params.beta;
    let mut forms = vec![vec![0u64; 64]; 4];
    let set = |f: &mut Vec<u64>, i: usize, j: usize, val: u64| {
        if i == j {
            f[i * 8 + i] = ctx.add_raw(f[i * 8 + i], val);
        } else {
            // split cross coefficients symmetrically; q odd
            let h = ctx.mul_raw(val, ctx.inv_raw(2 % ctx.p()).unwrap());
            f[i * 8 + j] = ctx.add_raw(f[i * 8 + j], h);
            f[j * 8 + i] = ctx.add_raw(f[j * 8 + i], h);
        }
    };
    // equation j is the q^j-Frobenius image of the curve equation:
    // L_j^2 - η^{q^j} Y_j^2 - η^{q^{j+1}} Y_{j+1}^2
    //       + 2 β^{q^j} (η^{(q+1)/2})^{q^j} Y_j Y_{j+1} = 0,
    // with L_0 = W0, L_1 = W1, L_2 = W2, L_3 = W0+W1+W2 and Y_4 = Y_0.
    // The cross coefficient is the Frobenius image of the element
    // η^{(q+1)/2}, not η to an averaged integer exponent: for j = 3 the
    // two readings differ by the sign η^{(q^4-1)/2} = -1, and only the
    // former makes the ψ∘φ correspondence exact.
    let eta_half = ctx.pow_raw(eta, (q + 1) / 2);
    for j in 0..4usize {
        let f = &mut forms[j];
        let yj = 4 + j;
        let yj1 = 4 + (j + 1) % 4;
        // the linear side
        let lin: &[usize] = if j < 3 { &[j] } else { &[0, 1, 2] };
        for &a in lin {
            for &b in lin {
                set(f, a.min(b), a.max(b), if a == b { 1 } else { 0 });
            }
        }
        if j == 3 {
            // cross terms of (W0+W1+W2)^2
            for a in 0..3usize {
                for b in a + 1..3 {
                    set(f, a, b, 2 % ctx.p());
                }
            }
        }
        set(f, yj, yj, ctx.neg_raw(ctx.frob_raw(eta, j)));
        set(f, yj1, yj1, ctx.neg_raw(ctx.frob_raw(eta, (j + 1) % 4)));
        let coef = ctx.mul_raw(
            ctx.mul_raw(2 % ctx.p(), ctx.frob_raw(beta, j)),
            ctx.frob_raw(eta_half, j),
        );
        set(f, yj.min(yj1), yj.max(yj1), coef);
    }
    Ok(QuadraticFormSystem { level: params.half, labels: V_LABELS, forms })
}

/// Pushes an F_q-point of W through the Moore projectivity φ
/// (coordinates become S^{q^i}, Z^{q^i}) and the difference map ψ, and
/// checks that the V equations vanish.
pub fn correspondence_check(
    ctx: &FieldContext,
    basis: &FqBasis,
    v_system: &QuadraticFormSystem,
    w_point: &[u64; 8],
) -> bool {
    let (s_val, z_val) = lift_point(ctx, basis, w_point);
    let mut x = [0u64; 4];
    let mut y = [0u64; 4];
    for i in 0..4 {
        x[i] = ctx.frob_raw(s_val, i);
        y[i] = ctx.frob_raw(z_val, i);
    }
    let image = [
        ctx.sub_raw(x[1], x[0]),
        ctx.sub_raw(x[2], x[1]),
        ctx.sub_raw(x[3], x[2]),
        x[3],
        y[0],
        y[1],
        y[2],
        y[3],
    ];
    v_system.vanishes_at(ctx, &image)
}

/// Outcome of the 3-space disjointness test behind dim V = 3.
#[derive(Debug, Clone, Copy)]
pub struct DimensionWitness {
    /// 4η^{q^3+q^2}(β^{2q^2}-1), the quantity whose non-vanishing forces
    /// the intersection to be empty
    pub discriminant: u64,
    /// points of the 3-space enumerated exhaustively (0 if skipped)
    pub points_checked: u64,
    /// points found on V among them
    pub points_on_v: u64,
}

impl DimensionWitness {
    pub fn disjoint(&self) -> bool {
        self.discriminant != 0 && self.points_on_v == 0
    }
}

/// Checks that the 3-space X3 = Y0 = Y1 = 0, Y2 + Y3 = 0 misses V:
/// symbolically through the discriminant, and exhaustively over
/// P^3(F_{q^4}) when that has at most 10^6 points.
pub fn dimension_witness_check(
    ctx: &FieldContext,
    params: &CurveParams,
) -> Result<DimensionWitness> {
    if params.beta == 1 || params.beta == ctx.neg_raw(1) {
        return Err(Error::InvalidParameter("dimension witness needs beta != ±1".into()));
    }
    let q = ctx.level_size(1) as u128;
    let b2q2 = ctx.pow_raw(ctx.mul_raw(params.beta, params.beta), q * q);
    let discriminant = ctx.mul_raw(
        ctx.mul_raw(4 % ctx.p(), ctx.pow_raw(params.eta, q.pow(3) + q.pow(2))),
        ctx.sub_raw(b2q2, 1),
    );

    let v_system = build_variety_v(ctx, params)?;
    let field = ctx.level_size(params.half);
    let proj_size = (field as u128).pow(3) + (field as u128).pow(2) + field as u128 + 1;
    let mut points_checked = 0u64;
    let mut points_on_v = 0u64;
    if proj_size <= 1_000_000 {
        let elems = ctx.subfield_elements(params.half)?;
        // P^3 coordinates (w0 : w1 : w2 : y2); the embedding sets
        // X3 = Y0 = Y1 = 0 and Y3 = -Y2
        let mut check = |w0: u64, w1: u64, w2: u64, y2: u64| {
            let v = [w0, w1, w2, 0, 0, 0, y2, ctx.neg_raw(y2)];
            points_checked += 1;
            if v_system.vanishes_at(ctx, &v) {
                points_on_v += 1;
            }
        };
        for lead in 0..4 {
            let free = 3 - lead;
            let total = (elems.len() as u64).pow(free as u32);
            for mut idx in 0..total {
                let mut c = [0u64; 4];
                c[lead] = 1;
                for slot in (lead + 1..4).rev() {
                    c[slot] = elems[(idx % elems.len() as u64) as usize];
                    idx /= elems.len() as u64;
                }
                check(c[0], c[1], c[2], c[3]);
            }
        }
    }
    Ok(DimensionWitness { discriminant, points_checked, points_on_v })
}

/// g = q^{2s} - q^s - 1.
pub fn genus(q: u64, s: u32) -> u128 {
    let qs = (q as u128).pow(s);
    qs * qs - qs - 1
}

/// Hasse-Weil window [q+1-2g√q, q+1+2g√q] for the rational-place count of
/// a genus-g curve over a field of size `q_half`; lower end clamped at 0.
pub fn hasse_weil_window(q_half: u64, g: u128) -> (f64, f64) {
    let center = q_half as f64 + 1.0;
    let spread = 2.0 * g as f64 * (q_half as f64).sqrt();
    ((center - spread).max(0.0), center + spread)
}

/// Closed f64 interval with outward rounding.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn exact(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    pub fn from_u128(x: u128) -> Interval {
        let f = x as f64;
        if f as u128 == x && f.fract() == 0.0 {
            Interval::exact(f)
        } else {
            Interval { lo: f.next_down(), hi: f.next_up() }
        }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval { lo: (self.lo - o.hi).next_down(), hi: (self.hi - o.lo).next_up() }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn sqrt(self) -> Interval {
        Interval { lo: self.lo.sqrt().next_down().max(0.0), hi: self.hi.sqrt().next_up() }
    }

    pub fn powi(self, k: u32) -> Interval {
        let mut acc = Interval::exact(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Certified enclosure of x^{1/3}, verified by cubing the endpoints.
pub fn cbrt_u128(x: u128) -> Interval {
    let xi = Interval::from_u128(x);
    let r = (x as f64).cbrt();
    let mut lo = r.next_down().next_down();
    let mut hi = r.next_up().next_up();
    while Interval::exact(lo).powi(3).hi > xi.lo {
        lo = lo.next_down();
    }
    while Interval::exact(hi).powi(3).lo < xi.hi {
        hi = hi.next_up();
    }
    Interval { lo, hi }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSign {
    Positive,
    NonPositive,
    Undetermined,
}

/// Certified evaluation of q^m - (d-1)(d-2) q^{m-1/2} - 5 d^{13/3} q^{m-1}.
#[derive(Debug, Clone, Copy)]
pub struct CafureMateraReport {
    pub hypothesis_ok: bool,
    pub interval: Interval,
    pub sign: BoundSign,
}

pub fn cafure_matera(q: u64, m: u32, d: u64) -> CafureMateraReport {
    let hypothesis_ok = (q as u128) > 2 * (m as u128 + 1) * (d as u128) * (d as u128);
    let qi = Interval::from_u128(q as u128);
    let qm = qi.powi(m);
    let qm1 = qi.powi(m - 1);
    let dd = (d as i128 - 1) * (d as i128 - 2); // zero for d in {1, 2}
    let mid = Interval::from_u128(dd as u128)
        .mul(qm1)
        .mul(qi.sqrt());
    let d13 = (d as u128).pow(13);
    let tail = Interval::exact(5.0).mul(cbrt_u128(d13)).mul(qm1);
    let interval = qm.sub(mid).sub(tail);
    let sign = if interval.lo > 0.0 {
        BoundSign::Positive
    } else if interval.hi <= 0.0 {
        BoundSign::NonPositive
    } else {
        BoundSign::Undetermined
    };
    CafureMateraReport { hypothesis_ok, interval, sign }
}

/// Least integer q with a certified-positive bound (monotone search above
/// the hypothesis threshold). Callers filter to odd prime powers.
pub fn min_q(m: u32, d: u64) -> u64 {
    let mut lo = 2 * (m as u64 + 1) * d * d + 1;
    let mut hi = lo.max(4);
    while cafure_matera(hi, m, d).sign != BoundSign::Positive {
        hi = hi.saturating_mul(2);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cafure_matera(mid, m, d).sign == BoundSign::Positive {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{BiGeneratedCode, Verdict};
    use crate::linpoly::FqBasis;

    fn ctx8() -> FieldContext {
        FieldContext::build_tower(3, 1, 8).unwrap()
    }

    fn some_alpha(ctx: &FieldContext) -> u64 {
        // a norm value outside {0, 1, -1}
        let m1 = ctx.neg_raw(1);
        ctx.subfield_elements(4)
            .unwrap()
            .into_iter()
            .find(|&a| a > 1 && a != m1)
            .unwrap()
    }

    #[test]
    fn beta_basics() {
        let ctx = ctx8();
        assert_eq!(beta_from_alpha(&ctx, ctx.neg_raw(1), true).unwrap(), 0);
        assert!(beta_from_alpha(&ctx, 1, true).is_err());
        let a = some_alpha(&ctx);
        let bp = beta_from_alpha(&ctx, a, true).unwrap();
        let bm = beta_from_alpha(&ctx, a, false).unwrap();
        assert_eq!(ctx.neg_raw(bp), bm);
    }

    #[test]
    fn curve_z_zero_points_are_the_rational_s_line() {
        let ctx = ctx8();
        let params = CurveParams::from_alpha(&ctx, some_alpha(&ctx), 1, true).unwrap();
        // Z = 0 forces S^q = S, i.e. S in F_q
        for &s_val in &ctx.subfield_elements(4).unwrap() {
            let on = params.eval(&ctx, s_val, 0) == 0;
            let fixed = ctx.frob_raw(s_val, 1) == s_val;
            assert_eq!(on, fixed);
        }
    }

    #[test]
    fn curve_count_invariant_under_eta_rescaling() {
        let ctx = ctx8();
        let params = CurveParams::from_alpha(&ctx, some_alpha(&ctx), 1, true).unwrap();
        let base = curve_points(&ctx, &params, false).unwrap().len();
        // η · σ^2 for a few σ in F_{q^4}
        let sub = ctx.subfield_elements(4).unwrap();
        for &sigma in &[sub[2], sub[3], sub[7]] {
            let eta2 = ctx.mul_raw(params.eta, ctx.mul_raw(sigma, sigma));
            let rescaled = params.clone().with_eta(eta2);
            assert_eq!(curve_points(&ctx, &rescaled, false).unwrap().len(), base);
        }
    }

    #[test]
    fn witnesses_verify_and_code_is_not_mrd() {
        let ctx = ctx8();
        let alpha = some_alpha(&ctx);
        for eps in [true, false] {
            let params = CurveParams::from_alpha(&ctx, alpha, 1, eps).unwrap();
            let pts = curve_points(&ctx, &params, true).unwrap();
            assert!(!pts.is_empty());
            for &pt in pts.iter().take(5) {
                let w = witness_from_point(&ctx, &params, pt).unwrap();
                assert!(!ctx.is_square_raw(w.delta, 4).unwrap());
            }
        }
        // the obstruction is sound: this class really is not MRD
        let delta = (1..ctx.size())
            .find(|&d| ctx.norm_raw(d, 4) == alpha)
            .unwrap();
        let code = BiGeneratedCode::delta_s(&ctx, delta, 1).unwrap();
        assert_ne!(code.classify_decision(&ctx).unwrap().verdict, Verdict::Mrd);
    }

    #[test]
    fn w_polarization_reconstructs_the_curve_form() {
        let ctx = ctx8();
        let params = CurveParams::from_alpha(&ctx, some_alpha(&ctx), 1, true).unwrap();
        let basis = FqBasis::normal_at(&ctx, 4).unwrap();
        let w = build_variety_w(&ctx, &params, &basis).unwrap();
        // Q(S,Z) = Σ f_i(coords) ξ^{q^i} for random coordinate tuples
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut v = [0u64; 8];
            for c in v.iter_mut() {
                *c = rng.gen_range(0..3);
            }
            let coords: Vec<u64> = (0..4).map(|k| w.eval(&ctx, k, &v)).collect();
            let recombined = basis.combine(&ctx, &coords);
            let (s_val, z_val) = lift_point(&ctx, &basis, &v);
            assert_eq!(recombined, params.eval(&ctx, s_val, z_val));
            // homogeneity: f_i(2v) = 4 f_i(v)
            let v2: [u64; 8] = std::array::from_fn(|i| ctx.mul_raw(2, v[i]));
            for k in 0..4 {
                assert_eq!(w.eval(&ctx, k, &v2), ctx.mul_raw(4 % 3, w.eval(&ctx, k, &v)));
            }
        }
    }

    #[test]
    fn w_points_lift_to_curve_points_and_map_to_v() {
        let ctx = ctx8();
        let params = CurveParams::from_alpha(&ctx, some_alpha(&ctx), 1, true).unwrap();
        let basis = FqBasis::normal_at(&ctx, 4).unwrap();
        let w = build_variety_w(&ctx, &params, &basis).unwrap();
        let v_sys = build_variety_v(&ctx, &params).unwrap();
        let pts = enumerate_w(&ctx, &w).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            let (s_val, z_val) = lift_point(&ctx, &basis, &p.coords);
            assert_eq!(params.eval(&ctx, s_val, z_val), 0);
            if p.z3_nonzero {
                assert_ne!(z_val, 0);
            }
            assert!(correspondence_check(&ctx, &basis, &v_sys, &p.coords));
        }
        // the vertex lies on V
        assert!(v_sys.vanishes_at(&ctx, &[0, 0, 0, 1, 0, 0, 0, 0]));
    }

    #[test]
    fn dimension_witness_at_q3() {
        let ctx = ctx8();
        let params = CurveParams::from_alpha(&ctx, some_alpha(&ctx), 1, true).unwrap();
        let dw = dimension_witness_check(&ctx, &params).unwrap();
        assert_eq!(dw.points_checked, 538_084);
        assert_eq!(dw.points_on_v, 0);
        assert!(dw.disjoint());
        // beta = ±1 rejected
        assert!(dimension_witness_check(
            &ctx,
            &CurveParams::from_beta(&ctx, 1, 1).unwrap()
        )
        .is_err());
    }

    #[test]
    fn genus_and_window() {
        assert_eq!(genus(3, 1), 5);
        assert_eq!(genus(5, 1), 19);
        let (lo, hi) = hasse_weil_window(81, 5);
        assert_eq!(lo, 0.0); // 82 - 90 clamps
        assert_eq!(hi, 172.0);
    }

    #[test]
    fn cafure_matera_thresholds() {
        let pos = cafure_matera(1_039_891, 3, 16);
        assert!(pos.hypothesis_ok);
        assert_eq!(pos.sign, BoundSign::Positive);
        let neg = cafure_matera(1_000_000, 3, 16);
        assert_eq!(neg.sign, BoundSign::NonPositive);
        // d = 1 collapses the middle term
        let simple = cafure_matera(100, 3, 1);
        let expect = 100f64.powi(3) - 5.0 * 100f64.powi(2);
        assert!(simple.interval.lo <= expect && expect <= simple.interval.hi);
        let cross = min_q(3, 16);
        assert!((1_039_000..=1_040_000).contains(&cross), "crossover {cross}");
    }
}

//! Spherical four-bar (4R) linkage: assembly, closure solves, and coupler
//! kinematics with exact first and second derivatives.
//!
//! All four joint axes pass through the sphere center; link lengths are the
//! great-circle angles α₁ (input), α₂ (coupler), α₃ (output) between adjacent
//! joint axes, with α₄ implied by the fixed axes x₁, x₄. The moving joint
//! directions are r₂(θ) = R(θ, x₁)·x₂ and r₃(φ) = R(φ, x₄)·x₃, and closure is
//! the single scalar equation r₂(θ)·r₃(φ) = cos α₂.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::dual::Dual2;
use crate::error::{Error, Result};
use crate::linalg::{
    add3, cross3, dot3, norm3, normalize3, rotate, rotate_unchecked, scale3, sub3, DVec3,
};

/// Which of the two closure roots (elbows) the mechanism is assembled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Branch {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Branch::Plus),
            -1 => Ok(Branch::Minus),
            other => Err(format!("branch_sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Branch> for i8 {
    fn from(b: Branch) -> i8 {
        match b {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

/// Defining parameters of the linkage and its coupler point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourBarParams {
    /// Fixed input joint axis (unit).
    pub x1: [f64; 3],
    /// Fixed output joint axis (unit).
    pub x4: [f64; 3],
    /// Input link angle, radians in (0, π).
    pub alpha1: f64,
    /// Coupler link angle, radians in (0, π).
    pub alpha2: f64,
    /// Output link angle, radians in (0, π).
    pub alpha3: f64,
    /// Coupler-point angle from r₂ about the coupler normal.
    pub beta: f64,
    /// Additional coupler-point angle defining the generating pair.
    pub gamma: f64,
    /// Input-link azimuth of the reference assembly (θ is measured from it).
    pub theta0: f64,
    /// Elbow selection for the assembly and the closed-form root.
    pub branch_sign: Branch,
}

impl FourBarParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.x1[0], self.x1[1], self.x1[2], self.x4[0], self.x4[1], self.x4[2],
            self.alpha1, self.alpha2, self.alpha3, self.beta, self.gamma, self.theta0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::ConfigError("parameters must be finite".into()));
        }
        for (name, axis) in [("x1", self.x1), ("x4", self.x4)] {
            let norm = norm3(axis);
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::ConfigError(format!(
                    "{name} must be a unit vector within 1e-9 (|{name}| = {norm})"
                )));
            }
        }
        for (name, angle) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
        ] {
            if !(angle > 0.0 && angle < PI) {
                return Err(Error::ConfigError(format!(
                    "{name} must lie strictly inside (0, π), got {angle}"
                )));
            }
        }
        Ok(())
    }
}

/// The assembled reference configuration: moving joint axes at θ = 0 and the
/// output azimuth they define.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyFrame {
    /// Input moving axis at the reference configuration.
    pub x2: [f64; 3],
    /// Output moving axis at the reference configuration.
    pub x3: [f64; 3],
    /// Fixed link angle arccos(x₁·x₄).
    pub alpha4: f64,
    /// Azimuth of x₃ about x₄, measured from the reference basis on x₄.
    pub phi0: f64,
}

fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Orthonormal azimuth basis (u, v) perpendicular to `pole`, with u pointing
/// toward `toward` and v = pole × u.
fn azimuth_basis(pole: [f64; 3], toward: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let u = sub3(toward, scale3(pole, dot3(pole, toward)));
    if norm3(u) <= 1e-9 {
        return Err(Error::AssemblyImpossible {
            detail: "fixed axes x1 and x4 are parallel; the azimuth reference is undefined".into(),
        });
    }
    let u = normalize3(u)?;
    Ok((u, cross3(pole, u)))
}

/// Construct the reference assembly.
///
/// x₂ is placed at azimuth Θ₀ about x₁; x₃ is the intersection of the circle
/// of angular radius α₃ about x₄ with the circle of angular radius α₂ about
/// x₂, the elbow picked by `branch_sign`.
pub fn assemble(params: &FourBarParams) -> Result<AssemblyFrame> {
    params.validate()?;
    let (x1, x4) = (params.x1, params.x4);
    let alpha4 = dot3(x1, x4).clamp(-1.0, 1.0).acos();

    // input azimuth basis on x1, pointing toward x4
    let (e1, e2) = azimuth_basis(x1, x4)?;
    let (s0, c0) = params.theta0.sin_cos();
    let x2 = add3(
        scale3(x1, params.alpha1.cos()),
        scale3(add3(scale3(e1, c0), scale3(e2, s0)), params.alpha1.sin()),
    );

    let (ca2, ca3) = (params.alpha2.cos(), params.alpha3.cos());
    let w = cross3(x2, x4);
    let wn = norm3(w);
    let x3 = if wn <= 1e-9 {
        // x2 ∥ x4: both constraint circles are centred on the same axis, so
        // they either coincide or miss entirely. When they coincide any
        // azimuth closes the loop; take the out-of-plane elbow.
        let sign = if dot3(x2, x4) >= 0.0 { 1.0 } else { -1.0 };
        if (ca2 - sign * ca3).abs() > 1e-9 {
            return Err(Error::AssemblyImpossible {
                detail: format!(
                    "x2 is parallel to x4 but cos(alpha2) = {ca2} does not match {}cos(alpha3)",
                    if sign > 0.0 { "" } else { "-" }
                ),
            });
        }
        let (f1, f2) = azimuth_basis(x4, x1)?;
        let chi = params.branch_sign.sign() * FRAC_PI_2;
        add3(
            scale3(x4, ca3),
            scale3(
                add3(scale3(f1, chi.cos()), scale3(f2, chi.sin())),
                params.alpha3.sin(),
            ),
        )
    } else {
        // solve x3 = λ·x2 + μ·x4 + ν·ŵ from x3·x2 = cos α2, x3·x4 = cos α3
        let c = dot3(x2, x4);
        let denom = 1.0 - c * c;
        let lambda = (ca2 - c * ca3) / denom;
        let mu = (ca3 - c * ca2) / denom;
        let nu2 = 1.0 - (lambda * lambda + mu * mu + 2.0 * lambda * mu * c);
        if nu2 < 0.0 {
            return Err(Error::AssemblyImpossible {
                detail: format!(
                    "constraint circles about x2 and x4 do not intersect (gap² = {:e})",
                    -nu2
                ),
            });
        }
        let nu = params.branch_sign.sign() * nu2.sqrt();
        add3(
            add3(scale3(x2, lambda), scale3(x4, mu)),
            scale3(w, nu / wn),
        )
    };

    // output azimuth of x3 about x4, measured from the basis pointing toward x1
    let (f1, f2) = azimuth_basis(x4, x1)?;
    let phi0 = dot3(x3, f2).atan2(dot3(x3, f1));

    Ok(AssemblyFrame { x2, x3, alpha4, phi0 })
}

/// One evaluated sweep point: output angle, coupler-curve point, and its
/// exact time derivatives under the given input rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub theta: f64,
    pub phi: f64,
    pub dphi: f64,
    pub ddphi: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
}

/// A validated, assembled linkage with cached trigonometry.
#[derive(Debug, Clone)]
pub struct Mechanism {
    params: FourBarParams,
    frame: AssemblyFrame,
    x1d: DVec3,
    x2d: DVec3,
    x3d: DVec3,
    x4d: DVec3,
    cos_a2: f64,
    // closure coefficients: A = a_s·sin(T), B = b_0 − b_c·cos(T),
    // C = c_c·cos(T) + c_0, with T = θ + Θ₀
    a_s: f64,
    b_0: f64,
    b_c: f64,
    c_c: f64,
    c_0: f64,
}

struct CouplerState {
    phi: Dual2,
    r2: DVec3,
    n23: DVec3,
}

impl Mechanism {
    pub fn new(params: FourBarParams) -> Result<Self> {
        let frame = assemble(&params)?;
        let (sa1, ca1) = params.alpha1.sin_cos();
        let (sa3, ca3) = params.alpha3.sin_cos();
        let (sa4, ca4) = frame.alpha4.sin_cos();
        let ca2 = params.alpha2.cos();
        Ok(Mechanism {
            params,
            frame,
            x1d: DVec3::constant(params.x1),
            x2d: DVec3::constant(frame.x2),
            x3d: DVec3::constant(frame.x3),
            x4d: DVec3::constant(params.x4),
            cos_a2: ca2,
            a_s: sa1 * sa3,
            b_0: ca1 * sa3 * sa4,
            b_c: sa1 * sa3 * ca4,
            c_c: sa1 * ca3 * sa4,
            c_0: ca1 * ca3 * ca4 - ca2,
        })
    }

    pub fn params(&self) -> &FourBarParams {
        &self.params
    }

    pub fn frame(&self) -> &AssemblyFrame {
        &self.frame
    }

    /// Closure condition r₂(θ)·r₃(φ) − cos α₂ as a dual triple; seed θ̃ and φ̃
    /// independently to extract partial derivatives.
    pub fn coupler_residual(&self, theta: Dual2, phi: Dual2) -> Dual2 {
        let r2 = rotate_unchecked(theta, &self.x1d, &self.x2d);
        let r3 = rotate_unchecked(phi, &self.x4d, &self.x3d);
        r2.dot(&r3) - self.cos_a2
    }

    /// Coefficients of the closure equation written on the output azimuth Ψ:
    /// B·cos Ψ − A·sin Ψ + C = 0, with T = θ + Θ₀.
    fn closure_coefficients(&self, theta: Dual2) -> (Dual2, Dual2, Dual2) {
        let t = theta + self.params.theta0;
        let sin_t = t.sin();
        let cos_t = t.cos();
        let a = sin_t * self.a_s;
        let b = Dual2::constant(self.b_0) - cos_t * self.b_c;
        let c = cos_t * self.c_c + self.c_0;
        (a, b, c)
    }

    /// Output angle from the closed-form root of the closure equation,
    /// evaluated entirely in dual arithmetic:
    /// Ψ = 2·atan2(A ± √(A² + B² − C²), C − B), φ = Ψ − Φ₀.
    pub fn output_angle_closed(&self, theta: Dual2) -> Result<Dual2> {
        let (a, b, c) = self.closure_coefficients(theta);
        let disc = a * a + b * b - c * c;
        if disc.val.abs() < 1e-12 {
            return Err(Error::BranchSingularity { theta: theta.val, disc: disc.val });
        }
        if disc.val < 0.0 {
            return Err(Error::NoAssembly { theta: theta.val, disc: disc.val });
        }
        let root = disc.sqrt()? * self.params.branch_sign.sign();

        // The half-angle tangent (A + s·√disc)/(C − B) equals its conjugate
        // form (B + C)/(A − s·√disc); pick whichever pair is farther from the
        // atan2 origin — they parametrize the same root.
        let (y1, x1) = (a + root, c - b);
        let (y2, x2) = (b + c, a - root);
        let psi = if y1.val * y1.val + x1.val * x1.val >= y2.val * y2.val + x2.val * x2.val {
            y1.atan2(x1)? * 2.0
        } else {
            y2.atan2(x2)? * 2.0
        };
        let mut phi = psi - self.frame.phi0;
        phi.val = wrap_angle(phi.val);
        Ok(phi)
    }

    /// Partial derivatives of the closure residual at a value point, packed
    /// as (F, F_θ, F_φ, F_θθ, F_θφ, F_φφ), each extracted from a dedicated
    /// seed (the mixed term from the diagonal seed).
    fn residual_partials(&self, theta: f64, phi: f64) -> (f64, f64, f64, f64, f64, f64) {
        let r_t = self.coupler_residual(Dual2::variable(theta), Dual2::constant(phi));
        let r_p = self.coupler_residual(Dual2::constant(theta), Dual2::variable(phi));
        let r_d = self.coupler_residual(Dual2::variable(theta), Dual2::variable(phi));
        let f_tp = 0.5 * (r_d.d2 - r_t.d2 - r_p.d2);
        (r_t.val, r_t.d1, r_p.d1, r_t.d2, f_tp, r_p.d2)
    }

    /// dφ/dθ and d²φ/dθ² at a point already on the constraint, by the
    /// implicit-function theorem.
    pub fn dphi_implicit(&self, theta: f64, phi: f64) -> Result<(f64, f64)> {
        let (f, f_t, f_p, f_tt, f_tp, f_pp) = self.residual_partials(theta, phi);
        if f.abs() > 1e-9 {
            return Err(Error::NotOnConstraint { residual: f.abs() });
        }
        if f_p.abs() < 1e-12 {
            return Err(Error::SingularJacobian { theta, dfdphi: f_p });
        }
        let dphi = -f_t / f_p;
        let ddphi = -(f_tt + 2.0 * f_tp * dphi + f_pp * dphi * dphi) / f_p;
        Ok((dphi, ddphi))
    }

    /// Output angle by Newton iteration on the closure residual, with exact
    /// derivative propagation: the value stage runs plain Newton until
    /// |F| < 1e-13, then d1/d2 come from the implicit-function theorem and
    /// compose with the incoming seed of θ̃.
    pub fn output_angle_newton(&self, theta: Dual2, guess: f64) -> Result<Dual2> {
        let th = theta.val;
        let mut phi = guess;
        let mut converged = false;
        for _ in 0..50 {
            let r = self.coupler_residual(Dual2::constant(th), Dual2::variable(phi));
            if r.val.abs() < 1e-13 {
                converged = true;
                break;
            }
            if r.d1.abs() < 1e-12 {
                return Err(Error::SingularJacobian { theta: th, dfdphi: r.d1 });
            }
            phi -= r.val / r.d1;
        }
        if !converged {
            let r = self.coupler_residual(Dual2::constant(th), Dual2::constant(phi));
            if r.val.abs() >= 1e-13 {
                return Err(Error::NewtonDivergence { iterations: 50, residual: r.val.abs() });
            }
        }
        let (_, f_t, f_p, f_tt, f_tp, f_pp) = self.residual_partials(th, phi);
        if f_p.abs() < 1e-12 {
            return Err(Error::SingularJacobian { theta: th, dfdphi: f_p });
        }
        let dphi = -f_t / f_p;
        let ddphi = -(f_tt + 2.0 * f_tp * dphi + f_pp * dphi * dphi) / f_p;
        // chain through the seed of θ̃
        Ok(Dual2::new(
            phi,
            dphi * theta.d1,
            ddphi * theta.d1 * theta.d1 + dphi * theta.d2,
        ))
    }

    /// Solved output angle and the θ-dependent coupler normal
    /// n̂₂₃ = (r₂ × r₃)/‖r₂ × r₃‖.
    fn coupler_state(&self, theta: Dual2) -> Result<CouplerState> {
        let closed = self.output_angle_closed(theta)?;
        let phi = self.output_angle_newton(theta, closed.val)?;
        let r2 = rotate_unchecked(theta, &self.x1d, &self.x2d);
        let r3 = rotate_unchecked(phi, &self.x4d, &self.x3d);
        let n23 = r2.cross(&r3).normalize()?;
        Ok(CouplerState { phi, r2, n23 })
    }

    /// Coupler point r_cp = R(ν, n̂₂₃)·r₂ — r₂ swung about the coupler normal
    /// by ν (seed ν̃ constant for a fixed offset).
    pub fn coupler_point(&self, theta: Dual2, nu: Dual2) -> Result<DVec3> {
        let st = self.coupler_state(theta)?;
        Ok(rotate_unchecked(nu, &st.n23, &st.r2))
    }

    fn curve_and_phi(&self, theta: Dual2) -> Result<(DVec3, Dual2)> {
        let st = self.coupler_state(theta)?;
        let cp_beta = rotate_unchecked(Dual2::constant(self.params.beta), &st.n23, &st.r2);
        let cp_beta_gamma = rotate_unchecked(
            Dual2::constant(self.params.beta + self.params.gamma),
            &st.n23,
            &st.r2,
        );
        // generated point: the (β+γ) coupler point swung a quarter turn about
        // the β coupler point
        let g = rotate(Dual2::constant(FRAC_PI_2), &cp_beta, &cp_beta_gamma)?;
        Ok((g, st.phi))
    }

    /// Generated coupler-curve point r_gen(θ̃) = R(π/2, r_cp(θ̃, β))·r_cp(θ̃, β+γ).
    pub fn coupler_curve(&self, theta: Dual2) -> Result<DVec3> {
        self.curve_and_phi(theta).map(|(g, _)| g)
    }

    /// Position, velocity, and acceleration of the generated point under
    /// input rates θ̇, θ̈:
    /// v = θ̇·∂θr_gen, a = θ̇²·∂²θr_gen + θ̈·∂θr_gen.
    pub fn kinematics(&self, theta: f64, theta_dot: f64, theta_ddot: f64) -> Result<KinematicSample> {
        let (g, phi) = self.curve_and_phi(Dual2::variable(theta))?;
        let d1 = g.d1s();
        let d2 = g.d2s();
        let mut velocity = [0.0; 3];
        let mut acceleration = [0.0; 3];
        for i in 0..3 {
            velocity[i] = theta_dot * d1[i];
            acceleration[i] = theta_dot * theta_dot * d2[i] + theta_ddot * d1[i];
        }
        Ok(KinematicSample {
            theta,
            phi: phi.val,
            dphi: phi.d1,
            ddphi: phi.d2,
            position: g.values(),
            velocity,
            acceleration,
        })
    }
}

//! Explicit Dormand–Prince 8(5,3) integrator with 7th-order dense output.
//!
//! Coefficients follow Hairer's DOP853. The stepper only advances forward in
//! time and hands out one [`DenseSegment`] per accepted step, so callers can
//! locate events on the continuous extension instead of on a sampling grid.

#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Right-hand side of an autonomous system `y' = f(y)`.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[f64], dy: &mut [f64]);
}

/// Step-size control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.01,
        }
    }
}

/// Continuous extension over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    n: usize,
    // Eight blocks of length n, laid out cont1..cont8.
    cont: Vec<f64>,
}

impl DenseSegment {
    #[inline]
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Interpolate the full state at `t`.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.blend(i, s, s1);
        }
    }

    /// Interpolate one component at `t`.
    #[inline]
    pub fn component(&self, i: usize, t: f64) -> f64 {
        let s = (t - self.t0) / self.h;
        self.blend(i, s, 1.0 - s)
    }

    #[inline]
    fn blend(&self, i: usize, s: f64, s1: f64) -> f64 {
        let n = self.n;
        let c = |j: usize| self.cont[j * n + i];
        let conpar = c(4) + (c(5) + (c(6) + c(7) * s) * s1) * s;
        c(0) + (c(1) + (c(2) + (c(3) + conpar * s1) * s) * s1) * s
    }
}

/// Forward DOP853 stepper over a state of fixed dimension.
pub struct Dop853<F: Rhs> {
    rhs: F,
    ctl: StepControl,
    n: usize,
    t: f64,
    h: f64,
    y: Vec<f64>,
    // Stages k1..k16 in blocks of length n; k[0] holds f(y) at the current t.
    k: Vec<f64>,
    ytmp: Vec<f64>,
    ynew: Vec<f64>,
    facold: f64,
    last_rejected: bool,
    accepted: usize,
    rejected: usize,
    evals: usize,
}

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;
const EXPO1: f64 = 1.0 / 8.0;

impl<F: Rhs> Dop853<F> {
    pub fn new(rhs: F, y0: &[f64], t0: f64, ctl: StepControl) -> Result<Self> {
        let n = rhs.dim();
        if y0.len() != n {
            return Err(Error::Numerical(format!(
                "initial state has length {}, system dimension is {n}",
                y0.len()
            )));
        }
        if !(ctl.rel_tol > 0.0 && ctl.abs_tol > 0.0 && ctl.max_step > 0.0) {
            return Err(Error::domain("step control parameters must be positive"));
        }
        let mut me = Dop853 {
            rhs,
            ctl,
            n,
            t: t0,
            h: 0.0,
            y: y0.to_vec(),
            k: vec![0.0; 16 * n],
            ytmp: vec![0.0; n],
            ynew: vec![0.0; n],
            facold: 1e-4,
            last_rejected: false,
            accepted: 0,
            rejected: 0,
            evals: 0,
        };
        let (k1, _) = me.k.split_at_mut(n);
        me.rhs.eval(&me.y, k1);
        me.evals += 1;
        me.h = me.initial_step();
        Ok(me)
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[inline]
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Derivative at the current point.
    #[inline]
    pub fn dy(&self) -> &[f64] {
        &self.k[..self.n]
    }

    pub fn rhs(&self) -> &F {
        &self.rhs
    }

    /// (accepted, rejected, function evaluations)
    pub fn stats(&self) -> (usize, usize, usize) {
        (self.accepted, self.rejected, self.evals)
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.ctl.abs_tol + self.ctl.rel_tol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.n;
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..n {
            let sk = self.scale(self.y[i], 0.0);
            dnf += (self.k[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.ctl.max_step);
        for i in 0..n {
            self.ytmp[i] = self.y[i] + h * self.k[i];
        }
        let mut f1 = vec![0.0; n];
        self.rhs.eval(&self.ytmp, &mut f1);
        self.evals += 1;
        let mut der2 = 0.0;
        for i in 0..n {
            let sk = self.scale(self.y[i], 0.0);
            der2 += ((f1[i] - self.k[i]) / sk).powi(2);
        }
        let der12 = (der2.sqrt() / h).max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(EXPO1)
        };
        (100.0 * h).min(h1).min(self.ctl.max_step)
    }

    /// Fill `ytmp = y + h * Σ coef_j k_j` over the listed stages (1-based).
    fn stage_input(&mut self, h: f64, terms: &[(usize, f64)]) {
        let n = self.n;
        for i in 0..n {
            let mut acc = 0.0;
            for &(j, a) in terms {
                acc += a * self.k[(j - 1) * n + i];
            }
            self.ytmp[i] = self.y[i] + h * acc;
        }
    }

    fn eval_stage(&mut self, j: usize) {
        let n = self.n;
        let out = &mut self.k[(j - 1) * n..j * n];
        self.rhs.eval(&self.ytmp, out);
        self.evals += 1;
    }

    /// Advance by one accepted step without passing `t_end`.
    ///
    /// Returns the continuous extension of that step.
    pub fn step(&mut self, t_end: f64) -> Result<DenseSegment> {
        let n = self.n;
        if t_end <= self.t {
            return Err(Error::Numerical(format!(
                "step requested to t = {t_end} from t = {}",
                self.t
            )));
        }
        loop {
            let mut h = self.h.min(self.ctl.max_step);
            let mut last = false;
            if self.t + 1.01 * h >= t_end {
                h = t_end - self.t;
                last = true;
            }
            if h.abs() <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepSize { t: self.t, h });
            }

            self.stage_input(h, &[(1, A21)]);
            self.eval_stage(2);
            self.stage_input(h, &[(1, A31), (2, A32)]);
            self.eval_stage(3);
            self.stage_input(h, &[(1, A41), (3, A43)]);
            self.eval_stage(4);
            self.stage_input(h, &[(1, A51), (3, A53), (4, A54)]);
            self.eval_stage(5);
            self.stage_input(h, &[(1, A61), (4, A64), (5, A65)]);
            self.eval_stage(6);
            self.stage_input(h, &[(1, A71), (4, A74), (5, A75), (6, A76)]);
            self.eval_stage(7);
            self.stage_input(h, &[(1, A81), (4, A84), (5, A85), (6, A86), (7, A87)]);
            self.eval_stage(8);
            self.stage_input(
                h,
                &[(1, A91), (4, A94), (5, A95), (6, A96), (7, A97), (8, A98)],
            );
            self.eval_stage(9);
            self.stage_input(
                h,
                &[
                    (1, A101),
                    (4, A104),
                    (5, A105),
                    (6, A106),
                    (7, A107),
                    (8, A108),
                    (9, A109),
                ],
            );
            self.eval_stage(10);
            self.stage_input(
                h,
                &[
                    (1, A111),
                    (4, A114),
                    (5, A115),
                    (6, A116),
                    (7, A117),
                    (8, A118),
                    (9, A119),
                    (10, A1110),
                ],
            );
            self.eval_stage(11);
            self.stage_input(
                h,
                &[
                    (1, A121),
                    (4, A124),
                    (5, A125),
                    (6, A126),
                    (7, A127),
                    (8, A128),
                    (9, A129),
                    (10, A1210),
                    (11, A1211),
                ],
            );
            self.eval_stage(12);

            let k = |j: usize, i: usize| self.k[(j - 1) * n + i];
            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..n {
                let bsum = B1 * k(1, i)
                    + B6 * k(6, i)
                    + B7 * k(7, i)
                    + B8 * k(8, i)
                    + B9 * k(9, i)
                    + B10 * k(10, i)
                    + B11 * k(11, i)
                    + B12 * k(12, i);
                let yn = self.y[i] + h * bsum;
                self.ynew[i] = yn;
                let sk = self.scale(self.y[i], yn);
                let e3 = bsum - BHH1 * k(1, i) - BHH2 * k(9, i) - BHH3 * k(12, i);
                err2 += (e3 / sk).powi(2);
                let e5 = ER1 * k(1, i)
                    + ER6 * k(6, i)
                    + ER7 * k(7, i)
                    + ER8 * k(8, i)
                    + ER9 * k(9, i)
                    + ER10 * k(10, i)
                    + ER11 * k(11, i)
                    + ER12 * k(12, i);
                err += (e5 / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();

            let fac11 = err.powf(EXPO1);
            let fac = (1.0 / FAC2).max((1.0 / FAC1).min(fac11 / SAFE));
            let mut h_new = h / fac;

            if err.is_finite() && err <= 1.0 {
                self.facold = err.max(1e-4);
                self.accepted += 1;
                // k13 = f(y_new)
                {
                    let out = &mut self.k[12 * n..13 * n];
                    self.rhs.eval(&self.ynew, out);
                    self.evals += 1;
                }
                let seg = self.dense(h);
                std::mem::swap(&mut self.y, &mut self.ynew);
                self.k.copy_within(12 * n..13 * n, 0);
                self.t = if last { t_end } else { self.t + h };
                if self.last_rejected {
                    h_new = h_new.min(h);
                    self.last_rejected = false;
                }
                self.h = h_new;
                return Ok(seg);
            }

            self.rejected += 1;
            self.last_rejected = true;
            let shrink = if fac11.is_finite() {
                (1.0 / FAC1).min(fac11 / SAFE)
            } else {
                1.0 / FAC1
            };
            self.h = h / shrink;
        }
    }

    /// Build the continuous extension; uses three extra stages.
    fn dense(&mut self, h: f64) -> DenseSegment {
        let n = self.n;
        let mut cont = vec![0.0; 8 * n];
        let rows: [[f64; 8]; 4] = [
            [D41, D46, D47, D48, D49, D410, D411, D412],
            [D51, D56, D57, D58, D59, D510, D511, D512],
            [D61, D66, D67, D68, D69, D610, D611, D612],
            [D71, D76, D77, D78, D79, D710, D711, D712],
        ];
        let stages = [1, 6, 7, 8, 9, 10, 11, 12];
        for i in 0..n {
            let ydiff = self.ynew[i] - self.y[i];
            let bspl = h * self.k[i] - ydiff;
            cont[i] = self.y[i];
            cont[n + i] = ydiff;
            cont[2 * n + i] = bspl;
            cont[3 * n + i] = ydiff - h * self.k[12 * n + i] - bspl;
            for (r, row) in rows.iter().enumerate() {
                let mut acc = 0.0;
                for (d, &j) in row.iter().zip(&stages) {
                    acc += d * self.k[(j - 1) * n + i];
                }
                cont[(4 + r) * n + i] = acc;
            }
        }

        self.stage_input(
            h,
            &[
                (1, A141),
                (7, A147),
                (8, A148),
                (9, A149),
                (10, A1410),
                (11, A1411),
                (12, A1412),
                (13, A1413),
            ],
        );
        self.eval_stage(14);
        self.stage_input(
            h,
            &[
                (1, A151),
                (6, A156),
                (7, A157),
                (8, A158),
                (11, A1511),
                (12, A1512),
                (13, A1513),
                (14, A1514),
            ],
        );
        self.eval_stage(15);
        self.stage_input(
            h,
            &[
                (1, A161),
                (6, A166),
                (7, A167),
                (8, A168),
                (9, A169),
                (13, A1613),
                (14, A1614),
                (15, A1615),
            ],
        );
        self.eval_stage(16);

        let tail: [[f64; 4]; 4] = [
            [D413, D414, D415, D416],
            [D513, D514, D515, D516],
            [D613, D614, D615, D616],
            [D713, D714, D715, D716],
        ];
        for i in 0..n {
            for (r, row) in tail.iter().enumerate() {
                let mut acc = cont[(4 + r) * n + i];
                for (d, j) in row.iter().zip(13..=16) {
                    acc += d * self.k[(j - 1) * n + i];
                }
                cont[(4 + r) * n + i] = h * acc;
            }
        }
        DenseSegment {
            t0: self.t,
            h,
            n,
            cont,
        }
    }
}

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;
const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const D41: f64 = -0.84289382761090128651353491142E+01;
const D46: f64 = 0.56671495351937776962531783590E+00;
const D47: f64 = -0.30689499459498916912797304727E+01;
const D48: f64 = 0.23846676565120698287728149680E+01;
const D49: f64 = 0.21170345824450282767155149946E+01;
const D410: f64 = -0.87139158377797299206789907490E+00;
const D411: f64 = 0.22404374302607882758541771650E+01;
const D412: f64 = 0.63157877876946881815570249290E+00;
const D413: f64 = -0.88990336451333310820698117400E-01;
const D414: f64 = 0.18148505520854727256656404962E+02;
const D415: f64 = -0.91946323924783554000451984436E+01;
const D416: f64 = -0.44360363875948939664310572000E+01;
const D51: f64 = 0.10427508642579134603413151009E+02;
const D56: f64 = 0.24228349177525818288430175319E+03;
const D57: f64 = 0.16520045171727028198505394887E+03;
const D58: f64 = -0.37454675472269020279518312152E+03;
const D59: f64 = -0.22113666853125306036270938578E+02;
const D510: f64 = 0.77334326684722638389603898808E+01;
const D511: f64 = -0.30674084731089398182061213626E+02;
const D512: f64 = -0.93321305264302278729567221706E+01;
const D513: f64 = 0.15697238121770843886131091075E+02;
const D514: f64 = -0.31139403219565177677282850411E+02;
const D515: f64 = -0.93529243588444783865713862664E+01;
const D516: f64 = 0.35816841486394083752465898540E+02;
const D61: f64 = 0.19985053242002433820987653617E+02;
const D66: f64 = -0.38703730874935176555105901742E+03;
const D67: f64 = -0.18917813819516756882830838328E+03;
const D68: f64 = 0.52780815920542364900561016686E+03;
const D69: f64 = -0.11573902539959630126141871134E+02;
const D610: f64 = 0.68812326946963000169666922661E+01;
const D611: f64 = -0.10006050966910838403183860980E+01;
const D612: f64 = 0.77771377980534432092869265740E+00;
const D613: f64 = -0.27782057523535084065932004339E+01;
const D614: f64 = -0.60196695231264120758267380846E+02;
const D615: f64 = 0.84320405506677161018159903784E+02;
const D616: f64 = 0.11992291136182789328035130030E+02;
const D71: f64 = -0.25693933462703749003312586129E+02;
const D76: f64 = -0.15418974869023643374053993627E+03;
const D77: f64 = -0.23152937917604549567536039109E+03;
const D78: f64 = 0.35763911791061412378285349910E+03;
const D79: f64 = 0.93405324183624310003907691704E+02;
const D710: f64 = -0.37458323136451633156875139351E+02;
const D711: f64 = 0.10409964950896230045147246184E+03;
const D712: f64 = 0.29840293426660503123344363579E+02;
const D713: f64 = -0.43533456590011143754432175058E+02;
const D714: f64 = 0.96324553959188282948394950600E+02;
const D715: f64 = -0.39177261675615439165231486172E+02;
const D716: f64 = -0.14972683625798562581422125276E+03;

#[cfg(test)]
mod tests {
    use super::*;

    struct Osc;
    impl Rhs for Osc {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay;
    impl Rhs for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, y: &[f64], dy: &mut [f64]) {
            dy[0] = -y[0];
        }
    }

    #[test]
    fn b_weights_sum_to_one() {
        let s = B1 + B6 + B7 + B8 + B9 + B10 + B11 + B12;
        assert!((s - 1.0).abs() < 1e-14, "{s}");
    }

    #[test]
    fn harmonic_oscillator_endpoint() {
        let ctl = StepControl {
            max_step: 1.0,
            ..StepControl::default()
        };
        let mut ode = Dop853::new(Osc, &[1.0, 0.0], 0.0, ctl).unwrap();
        let t_end = 10.0;
        while ode.t() < t_end {
            ode.step(t_end).unwrap();
        }
        assert_eq!(ode.t(), t_end);
        assert!((ode.y()[0] - t_end.cos()).abs() < 1e-9);
        assert!((ode.y()[1] + t_end.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_matches_exact_inside_steps() {
        let ctl = StepControl {
            max_step: 0.5,
            ..StepControl::default()
        };
        let mut ode = Dop853::new(Osc, &[1.0, 0.0], 0.0, ctl).unwrap();
        let mut worst: f64 = 0.0;
        let mut buf = [0.0; 2];
        while ode.t() < 6.0 {
            let seg = ode.step(6.0).unwrap();
            for j in 0..=10 {
                let t = seg.t0 + seg.h * j as f64 / 10.0;
                seg.eval(t, &mut buf);
                worst = worst.max((buf[0] - t.cos()).abs());
                worst = worst.max((seg.component(1, t) + t.sin()).abs());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn dense_segment_endpoints_match_state() {
        let mut ode = Dop853::new(Decay, &[1.0], 0.0, StepControl::default()).unwrap();
        let seg = ode.step(1.0).unwrap();
        assert_eq!(seg.component(0, seg.t0), 1.0);
        assert!((seg.component(0, seg.t1()) - ode.y()[0]).abs() < 1e-15);
    }

    #[test]
    fn respects_max_step() {
        let ctl = StepControl {
            max_step: 0.01,
            ..StepControl::default()
        };
        let mut ode = Dop853::new(Decay, &[1.0], 0.0, ctl).unwrap();
        while ode.t() < 1.0 {
            let seg = ode.step(1.0).unwrap();
            assert!(seg.h <= 0.01 * 1.0000001);
        }
        assert!((ode.y()[0] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_backward_step() {
        let mut ode = Dop853::new(Decay, &[1.0], 1.0, StepControl::default()).unwrap();
        assert!(ode.step(0.5).is_err());
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        assert!(Dop853::new(Decay, &[1.0, 2.0], 0.0, StepControl::default()).is_err());
    }
}

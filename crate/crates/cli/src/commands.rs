use std::path::{Path, PathBuf};

use hvb::exactla::Subspace;
use hvb::groupoid::{FinGroupoid, GroupoidDoc, Nerve};
use hvb::report::{CheckReport, Violation};
use hvb::ruth::{check_orbit_constancy, check_rh1, check_rh2, Ruth, RuthDoc};
use hvb::sdp::{build_sdp, check_grothendieck, check_unit_base, default_level, order_zero_coboundary, translation_nerve};
use hvb::split::{SplitContext, SplitError};
use hvb::svb::{
    check_cleavage, check_fibration, core, linear_coboundary, linear_cochain_cohomology, rank_identities, Cleavage,
    CleavageDoc, SimpVB, SimpVBDoc,
};

use crate::input::{builtin_input, builtin_ruth, write_json, InputError, Loader};
use crate::report::{expect, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Groupoid,
    Ruth,
    Svb,
    Cleavage,
}

pub struct Opts {
    pub level: Option<usize>,
    pub mcap: Option<usize>,
    pub loader: Loader,
}

fn invalid(e: impl std::fmt::Display) -> InputError {
    InputError::Invalid(e.to_string())
}

fn load_svb(o: &Opts, rep: &mut Report, path: &Path) -> Result<SimpVB, InputError> {
    let (doc, input): (SimpVBDoc, _) = o.loader.load(path)?;
    rep.inputs.push(input);
    SimpVB::from_doc(&doc).map_err(|e| InputError::Invalid(format!("{}: {e}", path.display())))
}

fn load_cleavage(o: &Opts, rep: &mut Report, v: &SimpVB, path: &Path) -> Result<Cleavage, InputError> {
    let (doc, input): (CleavageDoc, _) = o.loader.load(path)?;
    rep.inputs.push(input);
    Cleavage::from_doc(v, &doc).map_err(|e| InputError::Invalid(format!("{}: {e}", path.display())))
}

fn ruth_checks(rep: &mut Report, r: &Ruth, mcap: usize) {
    rep.note("order", r.order());
    rep.note("mcap", mcap);
    rep.check(check_rh1(r));
    rep.check(check_rh2(r, mcap));
    rep.property(check_orbit_constancy(r));
}

pub fn validate(o: &Opts, kind: Kind, path: &Path, svb: Option<&Path>) -> Result<Report, InputError> {
    let mut rep = Report::new(format!("validate {}", format!("{kind:?}").to_lowercase()));
    match kind {
        Kind::Groupoid => {
            let (doc, input): (GroupoidDoc, _) = o.loader.load(path)?;
            rep.inputs.push(input);
            let mut c = CheckReport::new("groupoid axioms");
            match FinGroupoid::from_doc(&doc) {
                Ok(g) => {
                    c.record(None);
                    rep.note("objects", g.num_objects());
                    rep.note("arrows", g.num_arrows());
                    let nerve = Nerve::new(&g, o.level.unwrap_or(3));
                    rep.note("nerve sizes", (0..=nerve.max_level()).map(|n| nerve.size(n)).collect::<Vec<_>>());
                }
                Err(e) => c.record(Some(Violation::new("groupoid axioms", 0, 0).detail(e.to_string()))),
            }
            rep.check(c);
        }
        Kind::Ruth => {
            let (doc, input): (RuthDoc, _) = o.loader.load(path)?;
            rep.inputs.push(input);
            let r = Ruth::from_doc(&doc).map_err(invalid)?;
            ruth_checks(&mut rep, &r, o.mcap.unwrap_or(r.default_mcap()));
        }
        Kind::Svb => {
            let v = load_svb(o, &mut rep, path)?;
            rep.check(v.check_identities());
            let fib = check_fibration(&v);
            rep.note("fibration order", fib.order);
            rep.note("max level", v.max_level());
            rep.check(fib.surjectivity);
        }
        Kind::Cleavage => {
            let svb = svb.ok_or_else(|| InputError::Invalid("validating a cleavage needs --svb".into()))?;
            let v = load_svb(o, &mut rep, svb)?;
            let c = load_cleavage(o, &mut rep, &v, path)?;
            let cr = check_cleavage(&v, &c);
            rep.check(cr.bijective);
            for p in [cr.normal, cr.weakly_flat, cr.flat, cr.interior_weak, cr.interior_flat] {
                rep.property(p);
            }
        }
    }
    Ok(rep)
}

pub enum RuthSource<'a> {
    Path(&'a Path),
    Builtin(&'a str),
}

pub fn build(
    o: &Opts,
    src: RuthSource<'_>,
    out_svb: Option<&PathBuf>,
    out_cleavage: Option<&PathBuf>,
) -> Result<Report, InputError> {
    let mut rep = Report::new("build-sdp");
    let r = match src {
        RuthSource::Path(p) => {
            let (doc, input): (RuthDoc, _) = o.loader.load(p)?;
            rep.inputs.push(input);
            Ruth::from_doc(&doc).map_err(invalid)?
        }
        RuthSource::Builtin(name) => {
            let r = builtin_ruth(name)?;
            rep.inputs.push(builtin_input(name, &r));
            r
        }
    };
    ruth_checks(&mut rep, &r, o.mcap.unwrap_or(r.default_mcap()));
    if !rep.passed {
        return Ok(rep);
    }
    let level = o.level.unwrap_or(default_level(&r));
    rep.note("level", level);
    let (v, c) = build_sdp(&r, level).map_err(invalid)?;

    rep.check(v.check_identities());
    let fib = check_fibration(&v);
    rep.note("fibration order", fib.order);
    rep.check(fib.surjectivity);
    let order_ok = fib.order == Some(r.order()) || level <= r.order() + 1;
    rep.check(expect(format!("fibration of order {}", r.order()), order_ok, None));
    rep.check(expect("core is the graded bundle", core(&v) == *r.bundle(), None));
    rep.check(rank_identities(&v));

    let cr = check_cleavage(&v, &c);
    rep.check(cr.bijective);
    rep.check(cr.normal);
    rep.check(cr.weakly_flat);
    rep.property(cr.flat);

    if r.order() == 0 {
        let same = translation_nerve(&r, level).map_err(invalid)? == v;
        rep.check(expect("equals the nerve of the translation groupoid", same, None));
    }
    if r.order() == 1 {
        rep.check(check_grothendieck(&r, &v).map_err(invalid)?);
    }
    if (0..r.groupoid().num_arrows()).all(|a| r.groupoid().is_unit(a)) {
        rep.check(check_unit_base(&r, &v).map_err(invalid)?);
    }

    if let Some(p) = out_svb {
        write_json(p, &v.to_doc())?;
    }
    if let Some(p) = out_cleavage {
        write_json(p, &c.to_doc())?;
    }
    Ok(rep)
}

pub fn split(o: &Opts, svb: &Path, cleavage: &Path, out: Option<&PathBuf>) -> Result<Report, InputError> {
    let mut rep = Report::new("split");
    let v = load_svb(o, &mut rep, svb)?;
    let c = load_cleavage(o, &mut rep, &v, cleavage)?;
    let ctx = match SplitContext::new(v, c) {
        Ok(ctx) => ctx,
        Err(e @ (SplitError::Cleavage { .. } | SplitError::NotFibration(_) | SplitError::Truncation { .. })) => {
            rep.check(expect("input is a fibration with a normal weakly flat cleavage", false, Some(&Violation::new("split hypotheses", 0, 0).detail(e.to_string()))));
            return Ok(rep);
        }
        Err(e) => return Err(invalid(e)),
    };
    rep.note("order", ctx.order());
    match ctx.roundtrip_bundle() {
        Ok((r, rt)) => {
            for c in [rt.rh1, rt.rh2, rt.invertible, rt.intertwines, rt.flat, rt.onto] {
                rep.check(c);
            }
            if let Some(p) = out {
                write_json(p, &r.to_doc())?;
            }
        }
        Err(e) => rep.check(expect("splitting succeeds", false, Some(&Violation::new("split", 0, 0).detail(e.to_string())))),
    }
    Ok(rep)
}

pub fn cohomology(o: &Opts, svb: &Path, max_degree: usize) -> Result<Report, InputError> {
    let mut rep = Report::new("cohomology");
    let v = load_svb(o, &mut rep, svb)?;
    let dims = linear_cochain_cohomology(&v, max_degree).map_err(invalid)?;
    rep.note("dims", dims.clone());

    // order 0: split with the whole fiber as cleavage and compare with the groupoid formula
    let fib = check_fibration(&v);
    rep.note("fibration order", fib.order);
    if fib.order == Some(0) {
        let c = Cleavage::from_fn(&v, |n, s| Subspace::full(v.dim(n, s))).map_err(invalid)?;
        let r = SplitContext::new(v.clone(), c).and_then(|ctx| ctx.extract_ruth()).map_err(invalid)?;
        let explicit = order_zero_coboundary(&r).map_err(invalid)?;
        let linear = linear_coboundary(&v, 0).map_err(invalid)?;
        let h0 = explicit.cols() - explicit.rank();
        rep.note("groupoid formula H^0", h0);
        rep.check(expect("rank of δ⁰ matches the groupoid formula", explicit.rank() == linear.rank(), None));
        rep.check(expect("H⁰ matches the groupoid formula", h0 == dims[0], None));
    }
    Ok(rep)
}

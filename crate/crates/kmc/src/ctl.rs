//! CTL formula trees, generic over the atomic-proposition type.
//!
//! Parsed formulas use [`crate::expr::Expr`] atoms; the fixpoint engine works
//! on formulas whose atoms are precomputed state sets. `normalize` rewrites
//! any formula into the base form `{True, Atom, Not, And, EX, EU, EG}` on
//! which satisfaction sets are computed.

/// A CTL formula with atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ctl<A> {
    /// Holds in every state.
    True,
    Atom(A),
    Not(Box<Ctl<A>>),
    And(Box<Ctl<A>>, Box<Ctl<A>>),
    Or(Box<Ctl<A>>, Box<Ctl<A>>),
    Implies(Box<Ctl<A>>, Box<Ctl<A>>),
    Ex(Box<Ctl<A>>),
    Ax(Box<Ctl<A>>),
    Ef(Box<Ctl<A>>),
    Af(Box<Ctl<A>>),
    Eg(Box<Ctl<A>>),
    Ag(Box<Ctl<A>>),
    Eu(Box<Ctl<A>>, Box<Ctl<A>>),
    Au(Box<Ctl<A>>, Box<Ctl<A>>),
}

impl<A> Ctl<A> {
    pub fn atom(a: A) -> Self {
        Ctl::Atom(a)
    }

    #[allow(clippy::should_implement_trait)] // builder named for the connective, like its siblings
    pub fn not(self) -> Self {
        Ctl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Self) -> Self {
        Ctl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        Ctl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Self) -> Self {
        Ctl::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn ex(self) -> Self {
        Ctl::Ex(Box::new(self))
    }

    pub fn ax(self) -> Self {
        Ctl::Ax(Box::new(self))
    }

    pub fn ef(self) -> Self {
        Ctl::Ef(Box::new(self))
    }

    pub fn af(self) -> Self {
        Ctl::Af(Box::new(self))
    }

    pub fn eg(self) -> Self {
        Ctl::Eg(Box::new(self))
    }

    pub fn ag(self) -> Self {
        Ctl::Ag(Box::new(self))
    }

    pub fn eu(self, rhs: Self) -> Self {
        Ctl::Eu(Box::new(self), Box::new(rhs))
    }

    pub fn au(self, rhs: Self) -> Self {
        Ctl::Au(Box::new(self), Box::new(rhs))
    }

    /// Applies `f` to every atom, preserving structure.
    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Ctl<B> {
        match self {
            Ctl::True => Ctl::True,
            Ctl::Atom(a) => Ctl::Atom(f(a)),
            Ctl::Not(p) => Ctl::Not(Box::new(p.map_atoms(f))),
            Ctl::And(p, q) => Ctl::And(Box::new(p.map_atoms(f)), Box::new(q.map_atoms(f))),
            Ctl::Or(p, q) => Ctl::Or(Box::new(p.map_atoms(f)), Box::new(q.map_atoms(f))),
            Ctl::Implies(p, q) => {
                Ctl::Implies(Box::new(p.map_atoms(f)), Box::new(q.map_atoms(f)))
            }
            Ctl::Ex(p) => Ctl::Ex(Box::new(p.map_atoms(f))),
            Ctl::Ax(p) => Ctl::Ax(Box::new(p.map_atoms(f))),
            Ctl::Ef(p) => Ctl::Ef(Box::new(p.map_atoms(f))),
            Ctl::Af(p) => Ctl::Af(Box::new(p.map_atoms(f))),
            Ctl::Eg(p) => Ctl::Eg(Box::new(p.map_atoms(f))),
            Ctl::Ag(p) => Ctl::Ag(Box::new(p.map_atoms(f))),
            Ctl::Eu(p, q) => Ctl::Eu(Box::new(p.map_atoms(f)), Box::new(q.map_atoms(f))),
            Ctl::Au(p, q) => Ctl::Au(Box::new(p.map_atoms(f)), Box::new(q.map_atoms(f))),
        }
    }

    /// Applies a fallible `f` to every atom, preserving structure.
    pub fn try_map_atoms<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<B, E>,
    ) -> Result<Ctl<B>, E> {
        fn bx<A, B, E>(
            p: &Ctl<A>,
            f: &mut impl FnMut(&A) -> Result<B, E>,
        ) -> Result<Box<Ctl<B>>, E> {
            Ok(Box::new(p.try_map_atoms(f)?))
        }
        Ok(match self {
            Ctl::True => Ctl::True,
            Ctl::Atom(a) => Ctl::Atom(f(a)?),
            Ctl::Not(p) => Ctl::Not(bx(p, f)?),
            Ctl::And(p, q) => Ctl::And(bx(p, f)?, bx(q, f)?),
            Ctl::Or(p, q) => Ctl::Or(bx(p, f)?, bx(q, f)?),
            Ctl::Implies(p, q) => Ctl::Implies(bx(p, f)?, bx(q, f)?),
            Ctl::Ex(p) => Ctl::Ex(bx(p, f)?),
            Ctl::Ax(p) => Ctl::Ax(bx(p, f)?),
            Ctl::Ef(p) => Ctl::Ef(bx(p, f)?),
            Ctl::Af(p) => Ctl::Af(bx(p, f)?),
            Ctl::Eg(p) => Ctl::Eg(bx(p, f)?),
            Ctl::Ag(p) => Ctl::Ag(bx(p, f)?),
            Ctl::Eu(p, q) => Ctl::Eu(bx(p, f)?, bx(q, f)?),
            Ctl::Au(p, q) => Ctl::Au(bx(p, f)?, bx(q, f)?),
        })
    }

    /// Visits every atom in the formula.
    pub fn for_each_atom(&self, f: &mut impl FnMut(&A)) {
        self.map_atoms(&mut |a| f(a));
    }

    /// True if the formula contains no temporal operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Ctl::True | Ctl::Atom(_) => true,
            Ctl::Not(p) => p.is_propositional(),
            Ctl::And(p, q) | Ctl::Or(p, q) | Ctl::Implies(p, q) => {
                p.is_propositional() && q.is_propositional()
            }
            _ => false,
        }
    }

    /// True if only `{True, Atom, Not, And, EX, EU, EG}` nodes occur.
    pub fn is_base_form(&self) -> bool {
        match self {
            Ctl::True | Ctl::Atom(_) => true,
            Ctl::Not(p) | Ctl::Ex(p) | Ctl::Eg(p) => p.is_base_form(),
            Ctl::And(p, q) | Ctl::Eu(p, q) => p.is_base_form() && q.is_base_form(),
            _ => false,
        }
    }
}

impl<A: Clone> Ctl<A> {
    /// Rewrites into the base form `{True, Atom, Not, And, EX, EU, EG}`.
    ///
    /// Uses the classical dualities: `AX p = !EX !p`, `EF p = E[true U p]`,
    /// `AG p = !E[true U !p]`, `AF p = !EG !p`, and
    /// `A[p U q] = !E[!q U (!p & !q)] & !EG !q`. `or` and `implies` are
    /// eliminated through `not`/`and`.
    pub fn normalize(&self) -> Ctl<A> {
        match self {
            Ctl::True => Ctl::True,
            Ctl::Atom(a) => Ctl::Atom(a.clone()),
            Ctl::Not(p) => p.normalize().not(),
            Ctl::And(p, q) => p.normalize().and(q.normalize()),
            Ctl::Or(p, q) => p.normalize().not().and(q.normalize().not()).not(),
            Ctl::Implies(p, q) => p.normalize().and(q.normalize().not()).not(),
            Ctl::Ex(p) => p.normalize().ex(),
            Ctl::Ax(p) => p.normalize().not().ex().not(),
            Ctl::Ef(p) => Ctl::True.eu(p.normalize()),
            Ctl::Af(p) => p.normalize().not().eg().not(),
            Ctl::Eg(p) => p.normalize().eg(),
            Ctl::Ag(p) => Ctl::True.eu(p.normalize().not()).not(),
            Ctl::Eu(p, q) => p.normalize().eu(q.normalize()),
            Ctl::Au(p, q) => {
                let np = p.normalize().not();
                let nq = q.normalize().not();
                let eu = nq.clone().eu(np.and(nq.clone())).not();
                eu.and(nq.eg().not())
            }
        }
    }
}

//! Rule templates of the CKR program. Inheritance guards use the closure
//! predicates `preceq_except` and `prec_star` derived in the global part.

pub(crate) const GLOBAL: &str = r#"
% (pgl-preceq1)
preceq(C1,C2,REL) :- prec(C1,C2,REL).
% (pgl-preceq2)
preceq(C1,C1,REL) :- context(C1), relation(REL).
% (pgl-preceqexc1)
preceq_except(C1,C2,REL) :- relation(REL), preceq(C1,C3,REL1), preceq(C3,C2,REL2), REL != REL1, REL != REL2.
% (pgl-preceqexc2)
preceq_except(C1,C2,REL) :- relation(REL), preceq(C1,C2,REL1), REL != REL1.
% (pgl-preceqexc3)
preceq_except(C,C,REL) :- context(C), relation(REL).
% (pgl-preceqexc4)
preceq_except(C1,C3,REL) :- preceq_except(C1,C2,REL), prec(C2,C3,REL1), REL != REL1.
% (pgl-precstar1)
prec_star(C1,C2) :- prec(C1,C2,REL).
% (pgl-precstar2)
prec_star(C1,C3) :- prec(C1,C2,REL), prec_star(C2,C3).
"#;

pub(crate) const RL: &str = r#"
% (prl-instd)
instd(X,Z,C,main) :- insta(X,Z,C).
% (prl-tripled)
tripled(X,R,Y,C,main) :- triplea(X,R,Y,C).
% (prl-eq)
unsat(T) :- eq(X,Y,C,T).
% (prl-top)
instd(X,top,C,main) :- nom(X,C).
% (prl-bot)
unsat(T) :- instd(X,bot,C,T).
% (prl-subc)
instd(X,Z,C,T) :- subClass(Y,Z,C), instd(X,Y,C,T).
% (prl-subcnj)
instd(X,Z,C,T) :- subConj(Y1,Y2,Z,C), instd(X,Y1,C,T), instd(X,Y2,C,T).
% (prl-subex)
instd(X,Z,C,T) :- subEx(V,Y,Z,C), tripled(X,V,X1,C,T), instd(X1,Y,C,T).
% (prl-supex)
tripled(X,R,X1,C,T) :- supEx(Y,R,X1,C), instd(X,Y,C,T).
% (prl-supforall)
instd(Y,Z1,C,T) :- supForall(Z,R,Z1,C), instd(X,Z,C,T), tripled(X,R,Y,C,T).
% (prl-leqone)
unsat(T) :- supLeqOne(Z,R,C), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), X1 != X2.
% (prl-subr)
tripled(X,W,X1,C,T) :- subRole(V,W,C), tripled(X,V,X1,C,T).
% (prl-subrc)
tripled(X,W,Z,C,T) :- subRChain(U,V,W,C), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T).
% (prl-dis)
unsat(T) :- dis(U,V,C), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T).
% (prl-inv1)
tripled(Y,V,X,C,T) :- inv(U,V,C), tripled(X,U,Y,C,T).
% (prl-inv2)
tripled(Y,U,X,C,T) :- inv(U,V,C), tripled(X,V,Y,C,T).
% (prl-irr)
unsat(T) :- irr(U,C), tripled(X,U,X,C,T).
% (prl-sat)
:- unsat(main).
"#;

pub(crate) const EVAL: &str = r#"
% (plc-subevalat)
instd(X,B,C,T) :- subEval(A,C1,B,C), instd(X,A,C1,T).
% (plc-subevalr)
tripled(X,S,Y,C,T) :- subEvalR(R,C1,S,C), tripled(X,R,Y,C1,T).
% (plc-subevalatp)
instd(X,B,C,T) :- subEval(A,C1,B,C2), instd(X,A,C1,T), prec_star(C,C2).
% (plc-subevalrp)
tripled(X,S,Y,C,T) :- subEvalR(R,C1,S,C2), tripled(X,R,Y,C1,T), prec_star(C,C2).
"#;

pub(crate) const OVR: &str = r#"
% (ovr-subc)
ovr(subClass,X,Y,Z,C1,C,REL1) :- def_subclass(Y,Z,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), instd(X,Y,C,main), not test_fails(nlit(X,Z,C)).
% (ovr-cnj)
ovr(subConj,X,Y1,Y2,Z,C1,C,REL1) :- def_subcnj(Y1,Y2,Z,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), instd(X,Y1,C,main), instd(X,Y2,C,main), not test_fails(nlit(X,Z,C)).
% (ovr-subex)
ovr(subEx,X,R,Y,Z,C1,C,REL1) :- def_subex(R,Y,Z,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,W,C,main), instd(W,Y,C,main), not test_fails(nlit(X,Z,C)).
% (ovr-supex)
ovr(supEx,X,Y,R,W,C1,C,REL1) :- def_supex(Y,R,W,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), instd(X,Y,C,main), not test_fails(nrel(X,R,W,C)).
% (ovr-forall)
ovr(supForall,X,Y,Z,R,W,C1,C,REL1) :- def_supforall(Z,R,W,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), instd(X,Z,C,main), tripled(X,R,Y,C,main), not test_fails(nlit(Y,W,C)).
% (ovr-leqone)
ovr(supLeqOne,X,X1,X2,Z,R,C1,C,REL1) :- def_supleqone(Z,R,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), instd(X,Z,C,main), tripled(X,R,X1,C,main), tripled(X,R,X2,C,main), X1 != X2.
% (ovr-subr)
ovr(subRole,X,Y,R,S,C1,C,REL1) :- def_subr(R,S,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,Y,C,main), not test_fails(nrel(X,S,Y,C)).
% (ovr-subrc)
ovr(subRChain,X,Y,Z,R,S,T,C1,C,REL1) :- def_subrc(R,S,T,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,Y,C,main), tripled(Y,S,Z,C,main), not test_fails(nrel(X,T,Z,C)).
% (ovr-dis)
ovr(dis,X,Y,R,S,C1,C,REL1) :- def_dis(R,S,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,Y,C,main), tripled(X,S,Y,C,main).
% (ovr-inv1)
ovr(inv,X,Y,R,S,C1,C,REL1) :- def_inv(R,S,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,Y,C,main), not test_fails(nrel(X,S,Y,C)).
% (ovr-inv2)
ovr(inv,X,Y,R,S,C1,C,REL1) :- def_inv(R,S,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(Y,S,X,C,main), not test_fails(nrel(X,R,Y,C)).
% (ovr-irr)
ovr(irr,X,R,C1,C,REL1) :- def_irr(R,C1,REL1), prec(C,C2,REL1), preceq_except(C2,C1,REL1), tripled(X,R,X,C,main).
"#;

pub(crate) const STRICT_INHERITANCE: &str = r#"
% (props-inst)
instd(X,Z,C,main) :- insta(X,Z,C1), prec_star(C,C1).
% (props-triple)
tripled(X,R,Y,C,main) :- triplea(X,R,Y,C1), prec_star(C,C1).
% (props-subc)
instd(X,Z,C,T) :- subClass(Y,Z,C1), instd(X,Y,C,T), prec_star(C,C1).
% (props-cnj)
instd(X,Z,C,T) :- subConj(Y1,Y2,Z,C1), instd(X,Y1,C,T), instd(X,Y2,C,T), prec_star(C,C1).
% (props-subex)
instd(X,Z,C,T) :- subEx(V,Y,Z,C1), tripled(X,V,X1,C,T), instd(X1,Y,C,T), prec_star(C,C1).
% (props-supex)
tripled(X,R,X1,C,T) :- supEx(Y,R,X1,C1), instd(X,Y,C,T), prec_star(C,C1).
% (props-forall)
instd(Y,Z1,C,T) :- supForall(Z,R,Z1,C1), instd(X,Z,C,T), tripled(X,R,Y,C,T), prec_star(C,C1).
% (props-leqone)
unsat(T) :- supLeqOne(Z,R,C1), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), X1 != X2, prec_star(C,C1).
% (props-subr)
tripled(X,W,X1,C,T) :- subRole(V,W,C1), tripled(X,V,X1,C,T), prec_star(C,C1).
% (props-subrc)
tripled(X,W,Z,C,T) :- subRChain(U,V,W,C1), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T), prec_star(C,C1).
% (props-dis)
unsat(T) :- dis(U,V,C1), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T), prec_star(C,C1).
% (props-inv1)
tripled(Y,V,X,C,T) :- inv(U,V,C1), tripled(X,U,Y,C,T), prec_star(C,C1).
% (props-inv2)
tripled(X,U,Y,C,T) :- inv(U,V,C1), tripled(Y,V,X,C,T), prec_star(C,C1).
% (props-irr)
unsat(T) :- irr(U,C1), tripled(X,U,X,C,T), prec_star(C,C1).
"#;

pub(crate) const DEFEASIBLE_INHERITANCE: &str = r#"
% (propd-subc)
instd(X,Z,C,T) :- def_subclass(Y,Z,C1,REL1), instd(X,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(subClass,X,Y,Z,C1,C,REL1).
% (propd-cnj)
instd(X,Z,C,T) :- def_subcnj(Y1,Y2,Z,C1,REL1), instd(X,Y1,C,T), instd(X,Y2,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(subConj,X,Y1,Y2,Z,C1,C,REL1).
% (propd-subex)
instd(X,Z,C,T) :- def_subex(V,Y,Z,C1,REL1), tripled(X,V,X1,C,T), instd(X1,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(subEx,X,V,Y,Z,C1,C,REL1).
% (propd-supex)
tripled(X,R,X1,C,T) :- def_supex(Y,R,X1,C1,REL1), instd(X,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(supEx,X,Y,R,X1,C1,C,REL1).
% (propd-forall)
instd(Y,Z1,C,T) :- def_supforall(Z,R,Z1,C1,REL1), instd(X,Z,C,T), tripled(X,R,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(supForall,X,Y,Z,R,Z1,C1,C,REL1).
% (propd-leqone)
unsat(T) :- def_supleqone(Z,R,C1,REL1), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), X1 != X2, prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(supLeqOne,X,X1,X2,Z,R,C1,C,REL1).
% (propd-subr)
tripled(X,W,X1,C,T) :- def_subr(V,W,C1,REL1), tripled(X,V,X1,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(subRole,X,X1,V,W,C1,C,REL1).
% (propd-subrc)
tripled(X,W,Z,C,T) :- def_subrc(U,V,W,C1,REL1), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(subRChain,X,Y,Z,U,V,W,C1,C,REL1).
% (propd-dis)
unsat(T) :- def_dis(U,V,C1,REL1), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(dis,X,Y,U,V,C1,C,REL1).
% (propd-inv1)
tripled(Y,V,X,C,T) :- def_inv(U,V,C1,REL1), tripled(X,U,Y,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(inv,X,Y,U,V,C1,C,REL1).
% (propd-inv2)
tripled(X,U,Y,C,T) :- def_inv(U,V,C1,REL1), tripled(Y,V,X,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(inv,X,Y,U,V,C1,C,REL1).
% (propd-irr)
unsat(T) :- def_irr(U,C1,REL1), tripled(X,U,X,C,T), prec(C,C2,REL1), preceq_except(C2,C1,REL1), not ovr(irr,X,U,C1,C,REL1).
"#;

pub(crate) const PARALLEL_INHERITANCE: &str = r#"
% (propp-subc)
instd(X,Z,C,T) :- def_subclass(Y,Z,C1,REL1), instd(X,Y,C,T), preceq_except(C,C1,REL1).
% (propp-cnj)
instd(X,Z,C,T) :- def_subcnj(Y1,Y2,Z,C1,REL1), instd(X,Y1,C,T), instd(X,Y2,C,T), preceq_except(C,C1,REL1).
% (propp-subex)
instd(X,Z,C,T) :- def_subex(V,Y,Z,C1,REL1), tripled(X,V,X1,C,T), instd(X1,Y,C,T), preceq_except(C,C1,REL1).
% (propp-supex)
tripled(X,R,X1,C,T) :- def_supex(Y,R,X1,C1,REL1), instd(X,Y,C,T), preceq_except(C,C1,REL1).
% (propp-forall)
instd(Y,Z1,C,T) :- def_supforall(Z,R,Z1,C1,REL1), instd(X,Z,C,T), tripled(X,R,Y,C,T), preceq_except(C,C1,REL1).
% (propp-leqone)
unsat(T) :- def_supleqone(Z,R,C1,REL1), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), X1 != X2, preceq_except(C,C1,REL1).
% (propp-subr)
tripled(X,W,X1,C,T) :- def_subr(V,W,C1,REL1), tripled(X,V,X1,C,T), preceq_except(C,C1,REL1).
% (propp-subrc)
tripled(X,W,Z,C,T) :- def_subrc(U,V,W,C1,REL1), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T), preceq_except(C,C1,REL1).
% (propp-dis)
unsat(T) :- def_dis(U,V,C1,REL1), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T), preceq_except(C,C1,REL1).
% (propp-inv1)
tripled(Y,V,X,C,T) :- def_inv(U,V,C1,REL1), tripled(X,U,Y,C,T), preceq_except(C,C1,REL1).
% (propp-inv2)
tripled(X,U,Y,C,T) :- def_inv(U,V,C1,REL1), tripled(Y,V,X,C,T), preceq_except(C,C1,REL1).
% (propp-irr)
unsat(T) :- def_irr(U,C1,REL1), tripled(X,U,X,C,T), preceq_except(C,C1,REL1).
"#;

pub(crate) const TEST: &str = r#"
% (test-subc)
test(nlit(X,Z,C)) :- def_subclass(Y,Z,C1,REL1), instd(X,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-subc)
:- test_fails(nlit(X,Z,C)), ovr(subClass,X,Y,Z,C1,C,REL).
% (test-subcnj)
test(nlit(X,Z,C)) :- def_subcnj(Y1,Y2,Z,C1,REL1), instd(X,Y1,C,main), instd(X,Y2,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-subcnj)
:- test_fails(nlit(X,Z,C)), ovr(subConj,X,Y1,Y2,Z,C1,C,REL).
% (test-subex)
test(nlit(X,Z,C)) :- def_subex(R,Y,Z,C1,REL1), tripled(X,R,W,C,main), instd(W,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-subex)
:- test_fails(nlit(X,Z,C)), ovr(subEx,X,R,Y,Z,C1,C,REL).
% (test-supex)
test(nrel(X,R,W,C)) :- def_supex(Y,R,W,C1,REL1), instd(X,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-supex)
:- test_fails(nrel(X,R,W,C)), ovr(supEx,X,Y,R,W,C1,C,REL).
% (test-supforall)
test(nlit(Y,W,C)) :- def_supforall(Z,R,W,C1,REL1), instd(X,Z,C,main), tripled(X,R,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-supforall)
:- test_fails(nlit(Y,W,C)), ovr(supForall,X,Y,Z,R,W,C1,C,REL).
% (test-subr)
test(nrel(X,S,Y,C)) :- def_subr(R,S,C1,REL1), tripled(X,R,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-subr)
:- test_fails(nrel(X,S,Y,C)), ovr(subRole,X,Y,R,S,C1,C,REL).
% (test-subrc)
test(nrel(X,T,Z,C)) :- def_subrc(R,S,T,C1,REL1), tripled(X,R,Y,C,main), tripled(Y,S,Z,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-subrc)
:- test_fails(nrel(X,T,Z,C)), ovr(subRChain,X,Y,Z,R,S,T,C1,C,REL).
% (test-inv1)
test(nrel(X,S,Y,C)) :- def_inv(R,S,C1,REL1), tripled(X,R,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (test-inv2)
test(nrel(Y,R,X,C)) :- def_inv(R,S,C1,REL1), tripled(X,S,Y,C,main), prec(C,C2,REL1), preceq_except(C2,C1,REL1).
% (constr-inv1)
:- not test_fails(nrel(X,S,Y,C)), ovr(inv,X,Y,R,S,C1,C,REL).
% (constr-inv2)
:- not test_fails(nrel(Y,R,X,C)), ovr(inv,X,Y,R,S,C1,C,REL).
% (test-fails1)
test_fails(nlit(X,Z,C)) :- instd(X,Z,C,nlit(X,Z,C)), not unsat(nlit(X,Z,C)).
% (test-fails2)
test_fails(nrel(X,R,Y,C)) :- tripled(X,R,Y,C,nrel(X,R,Y,C)), not unsat(nrel(X,R,Y,C)).
% (test-add1)
instd(X,Z,C,nlit(X,Z,C)) :- test(nlit(X,Z,C)).
% (test-add2)
tripled(X,R,Y,C,nrel(X,R,Y,C)) :- test(nrel(X,R,Y,C)).
% (test-copy1)
instd(X1,Y1,C,T) :- instd(X1,Y1,C,main), test(T).
% (test-copy2)
tripled(X1,R,Y1,C,T) :- tripled(X1,R,Y1,C,main), test(T).
"#;

/// Preparation rules for the preference statements. Emitted, not solved.
pub(crate) const PREP: &str = r#"
% (prep-indiv)
ind(X) :- nom(X,C).
% (prep-ovr-subs)
p_ovr(subClass(X,Y,Z),C,REL) :- def_subclass(Y,Z,C,REL), ind(X).
% (prep-ovr-subc)
p_ovr(subConj(X,Y1,Y2,Z),C,REL) :- def_subcnj(Y1,Y2,Z,C,REL), ind(X).
% (prep-ovr-subex)
p_ovr(subEx(X,R,Y,Z),C,REL) :- def_subex(R,Y,Z,C,REL), ind(X).
% (prep-ovr-supex)
p_ovr(supEx(X,Y,R,W),C,REL) :- def_supex(Y,R,W,C,REL), ind(X).
% (prep-ovr-supfa)
p_ovr(supForall(X,Y,Z,R,W),C,REL) :- def_supforall(Z,R,W,C,REL), ind(X), ind(Y).
% (prep-ovr-suble)
p_ovr(supLeqOne(X,X1,X2,Z,R),C,REL) :- def_supleqone(Z,R,C,REL), ind(X), ind(X1), ind(X2).
% (prep-ovr-subr)
p_ovr(subRole(X,Y,R,S),C,REL) :- def_subr(R,S,C,REL), ind(X), ind(Y).
% (prep-ovr-subrc)
p_ovr(subRChain(X,Y,Z,R,S,T),C,REL) :- def_subrc(R,S,T,C,REL), ind(X), ind(Y), ind(Z).
% (prep-ovr-dis)
p_ovr(dis(X,Y,R,S),C,REL) :- def_dis(R,S,C,REL), ind(X), ind(Y).
% (prep-ovr-inv)
p_ovr(inv(X,Y,R,S),C,REL) :- def_inv(R,S,C,REL), ind(X), ind(Y).
% (prep-ovr-irr)
p_ovr(irr(X,R),C,REL) :- def_irr(R,C,REL), ind(X).
% (act-ovr-subs)
ovr(subClass(X,Y,Z),C1,C,REL) :- ovr(subClass,X,Y,Z,C1,C,REL).
% (act-ovr-subc)
ovr(subConj(X,Y1,Y2,Z),C1,C,REL) :- ovr(subConj,X,Y1,Y2,Z,C1,C,REL).
% (act-ovr-subex)
ovr(subEx(X,R,Y,Z),C1,C,REL) :- ovr(subEx,X,R,Y,Z,C1,C,REL).
% (act-ovr-supex)
ovr(supEx(X,Y,R,W),C1,C,REL) :- ovr(supEx,X,Y,R,W,C1,C,REL).
% (act-ovr-supfa)
ovr(supForall(X,Y,Z,R,W),C1,C,REL) :- ovr(supForall,X,Y,Z,R,W,C1,C,REL).
% (act-ovr-suble)
ovr(supLeqOne(X,X1,X2,Z,R),C1,C,REL) :- ovr(supLeqOne,X,X1,X2,Z,R,C1,C,REL).
% (act-ovr-subr)
ovr(subRole(X,Y,R,S),C1,C,REL) :- ovr(subRole,X,Y,R,S,C1,C,REL).
% (act-ovr-subrc)
ovr(subRChain(X,Y,Z,R,S,T),C1,C,REL) :- ovr(subRChain,X,Y,Z,R,S,T,C1,C,REL).
% (act-ovr-dis)
ovr(dis(X,Y,R,S),C1,C,REL) :- ovr(dis,X,Y,R,S,C1,C,REL).
% (act-ovr-inv)
ovr(inv(X,Y,R,S),C1,C,REL) :- ovr(inv,X,Y,R,S,C1,C,REL).
% (act-ovr-irr)
ovr(irr(X,R),C1,C,REL) :- ovr(irr,X,R,C1,C,REL).
% (prep-weight)
relation_weight(R,W) :- rel_w(R,W).
"#;

/// The asprin statements, one per line.
pub(crate) const PREFERENCES: &str = "\
% (pref-local)
#preference(LocPref(C,REL),poset){ not ovr(A,Cp,C,REL) >> ovr(A,Cp,C,REL); not ovr(A1,C1,C,REL) >> not ovr(A2,C2,C,REL) : preceq_except(C1b,C1,REL), preceq_except(C2b,C2,REL), prec(C,C2b,REL), prec(C2b,C1b,REL), p_ovr(A1,C1,REL), p_ovr(A2,C2,REL) } : context(C), relation(REL).
% (pref-rel_local)
#preference(RelPref(REL),pareto){ **LocPref(C,REL) : context(C) } : relation(REL).
% (pref-global)
#preference(GlobPref,lexico){ W::**RelPref(REL) : relation_weight(REL, W) }.
% (pref-optima)
#optimize(GlobPref).
";

# dev-only grid search over scenario shapes, ratio-0.1 gates only
import numpy as np
from calibrate import make_corr, SIGNS
from ftwnb.synth import ScenarioConfig, _BASE_MEANS, _BASE_SIGMAS, generate_samples
from ftwnb.data import split_train_test, subsample_ratio
from ftwnb.classifiers import ftwnb_train, ftwnb_predict_batch, FtWnbConfig
from ftwnb.metrics import confusion, summary_metrics

V = [1, 2, 8]          # RSS, FP_INDEX, POWER_RATIO (veto)
B = [3, 4, 5, 6]       # F1 F2 F3 FPPL (block)
W = [9, 10, 11]        # weak
RXP = 7

def build(voff, boff, gr, br, vsig, bsig):
    offs = np.zeros(12); ratios = np.full(12, 1.1)
    for i in V: offs[i] = voff
    for i in B: offs[i] = boff
    offs[RXP] = 0.6 * boff
    offs[2] += 0.15; offs[8] += 0.1   # FPI, PR slightly stronger
    for i, v in zip(W, (0.5, 0.6, 0.4)): offs[i] = v
    for i in V: ratios[i] = vsig
    ratios[RXP] = vsig
    for i in B: ratios[i] = bsig
    los_means = _BASE_MEANS[0]; los_sigmas = _BASE_SIGMAS[0]
    nlos_means = los_means + offs * los_sigmas * SIGNS
    return ScenarioConfig(name="studio", true_distance_range=(0.5, 5.8), noise_sigma=0.05,
                          nlos_bias=(0.7, 0.35),
                          feature_means=np.stack([los_means, nlos_means]),
                          feature_sigmas=np.stack([los_sigmas, los_sigmas * ratios]),
                          correlation_target=make_corr(gr, br), class_separation=1.0)

def gate01(scn, seeds=range(12)):
    accs0, accs40, nb, nl0, nl40, los0, los40 = [], [], [], [], [], [], []
    for seed in seeds:
        ds = subsample_ratio(generate_samples(scn, 1000, 1000, seed=seed), 0.1, seed=seed)
        train, test = split_train_test(ds, 0.3, seed=seed)
        for cfgname, cfg, acc_l, nl_l, los_l in (
            ("ft0", FtWnbConfig(finetune_cap=0), accs0, nl0, los0),
            ("ft40", FtWnbConfig(finetune_cap=40), accs40, nl40, los40),
        ):
            m = ftwnb_train(train, cfg)
            lab, _ = ftwnb_predict_batch(m, test.features)
            r = summary_metrics(confusion(test.labels, lab))
            acc_l.append(r.accuracy); nl_l.append(r.nlos_correct_rate); los_l.append(r.los_correct_rate)
        mnb = ftwnb_train(train, FtWnbConfig(weights="unit", finetune_cap=0))
        lab, _ = ftwnb_predict_batch(mnb, test.features)
        nb.append(summary_metrics(confusion(test.labels, lab)).accuracy)
    a0, a40 = np.array(accs0), np.array(accs40)
    n0, n40 = np.array(nl0), np.array(nl40)
    imp = int((n40 > n0).sum())
    res = dict(
        wnb_acc=a0.mean(), ft_acc=a40.mean(), nb_acc=np.mean(nb),
        dacc=a40.mean() - a0.mean(), nlos0=n0.mean(), nlos40=n40.mean(),
        los0=np.mean(los0), los40=np.mean(los40), imp=imp, n=len(a0),
    )
    res["pass"] = (res["dacc"] >= 0 and imp >= 0.75 * len(a0) and res["ft_acc"] >= res["nb_acc"]
                   and 0.95 <= res["wnb_acc"] <= 0.99)
    return res

if __name__ == "__main__":
    rows = []
    for voff in (2.0, 2.3):
        for boff in (1.2, 1.5):
            for gr in (0.18, 0.25):
                for br in (0.45,):
                    for vsig in (0.8,):
                        for bsig in (0.9, 1.15):
                            r = gate01(build(voff, boff, gr, br, vsig, bsig))
                            tag = f"v{voff} b{boff} gr{gr} br{br} vs{vsig} bs{bsig}"
                            print(f"{tag}: wnb={r['wnb_acc']:.4f} dacc={r['dacc']:+.4f} "
                                  f"nlos {r['nlos0']:.3f}->{r['nlos40']:.3f} los {r['los0']:.3f}->{r['los40']:.3f} "
                                  f"imp={r['imp']}/{r['n']} nb={r['nb_acc']:.4f} {'*** PASS' if r['pass'] else ''}",
                                  flush=True)
                            rows.append((tag, r))

# dev-only calibration harness, not part of the package
import numpy as np
from ftwnb.synth import ScenarioConfig, generate_samples, _BASE_MEANS, _BASE_SIGMAS
from ftwnb.classifiers import ftwnb_train, ftwnb_predict_batch, FtWnbConfig
from ftwnb.data import split_train_test, subsample_ratio, DEFAULT_SCHEMA
from ftwnb.metrics import confusion, summary_metrics

SIGNS = np.array([0, -1, +1, -1, -1, -1, -1, -1, +1, +1, +1, -1], dtype=float)
IDX = {n: i for i, n in enumerate(DEFAULT_SCHEMA)}
INFORMATIVE = ["RSS", "FP_INDEX", "F1_AMP", "F2_AMP", "F3_AMP", "FPPL", "RX_POWER", "POWER_RATIO"]
BLOCK = ["F1_AMP", "F2_AMP", "F3_AMP", "FPPL"]

def make_corr(global_r=0.45, block_r=0.75):
    corr = np.eye(12)
    def put(a, b, v):
        corr[IDX[a], IDX[b]] = corr[IDX[b], IDX[a]] = v
    for i, a in enumerate(INFORMATIVE):
        for b in INFORMATIVE[i+1:]:
            put(a, b, global_r)
    for i, a in enumerate(BLOCK):
        for b in BLOCK[i+1:]:
            put(a, b, block_r)
    put("RSS", "RX_POWER", 0.65)
    put("FP_INDEX", "POWER_RATIO", 0.55)
    put("NOISE_STD", "MAX_NOISE", 0.5)
    put("RANGE", "RSS", -0.3)
    put("RANGE", "RX_POWER", -0.25)
    # ensure PD
    w = np.linalg.eigvalsh(corr)
    if w.min() <= 1e-6:
        lam = 0.05 + abs(w.min())
        corr = (corr + lam * np.eye(12)) / (1 + lam)
        np.fill_diagonal(corr, 1.0)
    return corr

def make_scenario(offsets_sigma, sigma_ratio, global_r=0.45, block_r=0.75,
                  noise_sigma=0.05, bias=(0.7, 0.35), dist=(0.5, 5.8), name="studio"):
    los_means = _BASE_MEANS[0].copy()
    los_sigmas = _BASE_SIGMAS[0].copy()
    nlos_means = los_means + offsets_sigma * los_sigmas * SIGNS
    means = np.stack([los_means, nlos_means])
    sigmas = np.stack([los_sigmas, los_sigmas * sigma_ratio])
    return ScenarioConfig(name=name, true_distance_range=dist, noise_sigma=noise_sigma,
                          nlos_bias=bias, feature_means=means, feature_sigmas=sigmas,
                          correlation_target=make_corr(global_r, block_r), class_separation=1.0)

def evaluate(scn, ratios=(0.1, 0.5, 1.0), seeds=range(20), caps=(0, 40), verbose=True):
    acc = {(r, c): [] for r in ratios for c in caps}
    nlos = {(r, c): [] for r in ratios for c in caps}
    los = {(r, c): [] for r in ratios for c in caps}
    accnb = {r: [] for r in ratios}
    for seed in seeds:
        base = generate_samples(scn, 1000, 1000, seed=seed)
        for r in ratios:
            ds = subsample_ratio(base, r, seed=seed)
            train, test = split_train_test(ds, 0.3, seed=seed)
            for c in caps:
                m = ftwnb_train(train, FtWnbConfig(finetune_cap=c))
                lab, _ = ftwnb_predict_batch(m, test.features)
                rep = summary_metrics(confusion(test.labels, lab))
                acc[(r, c)].append(rep.accuracy)
                nlos[(r, c)].append(rep.nlos_correct_rate)
                los[(r, c)].append(rep.los_correct_rate)
            mnb = ftwnb_train(train, FtWnbConfig(weights="unit", finetune_cap=0))
            lab, _ = ftwnb_predict_batch(mnb, test.features)
            accnb[r].append(summary_metrics(confusion(test.labels, lab)).accuracy)
    ok = True
    for r in ratios:
        line = f"ratio {r}: NBacc={np.mean(accnb[r]):.4f}"
        for c in caps:
            line += (f" | cap{c}: acc={np.mean(acc[(r,c)]):.4f} nlos={np.mean(nlos[(r,c)]):.3f}"
                     f" los={np.mean(los[(r,c)]):.3f}")
        if verbose: print(line)
    r = ratios[0]
    a0, a40 = np.array(nlos[(r, 0)]), np.array(nlos[(r, 40)])
    imp = int((a40 > a0).sum())
    ok &= imp >= 16
    if verbose: print(f"  nlos recall strict improvements cap40>cap0: {imp}/20, ties {(a40==a0).sum()} {'OK' if imp>=16 else 'FAIL'}")
    dacc = np.mean(acc[(r, 40)]) - np.mean(acc[(r, 0)])
    ok &= dacc >= 0
    if verbose: print(f"  acc cap40-cap0 = {dacc:+.4f} {'OK' if dacc>=0 else 'FAIL'}")
    ft = {rr: np.array(acc[(rr, 40)]) for rr in ratios}
    for lo_r, hi_r in zip(ratios, ratios[1:]):
        d = ft[hi_r].mean() - ft[lo_r].mean()
        se = np.sqrt(ft[hi_r].var(ddof=1)/len(seeds) + ft[lo_r].var(ddof=1)/len(seeds))
        ok &= d >= -se
        if verbose: print(f"  acc({hi_r}) - acc({lo_r}) = {d:+.4f} (pooled SE {se:.4f}) {'OK' if d >= -se else 'FAIL'}")
    for rr in ratios:
        o = ft[rr].mean() >= np.mean(accnb[rr])
        ok &= o
        if verbose: print(f"  FT>=NB at {rr}: {ft[rr].mean():.4f} vs {np.mean(accnb[rr]):.4f} {'OK' if o else 'FAIL'}")
    band = 0.95 <= np.mean(acc[(0.1, 0)]) <= 0.99
    ok &= band
    if verbose: print(f"  WNB acc band 95-99 at 0.1: {np.mean(acc[(0.1,0)]):.4f} {'OK' if band else 'FAIL'}")
    return ok

if __name__ == "__main__":
    import sys
    offs = np.array([0, 2.0, 2.2, 1.8, 1.7, 1.5, 1.9, 1.2, 2.3, 0.5, 0.6, 0.3])
    for sr in (1.4, 1.6):
        for gr in (0.35, 0.5):
            print(f"=== sigma_ratio={sr} global_r={gr}")
            evaluate(make_scenario(offs, sigma_ratio=sr, global_r=gr))

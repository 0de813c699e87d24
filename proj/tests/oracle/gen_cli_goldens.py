"""Synthetic curated corpus plus golden outputs for the score, ued and
compare subcommands, computed by straightforward reimplementations
(math.fsum for sums, scipy for the t distribution).

    python3 gen_cli_goldens.py ../data
"""
import csv
import json
import math
from fractions import Fraction
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from scipy import stats

LOW, HIGH = 0.33, 0.67
WINDOW, MIN_TWEETS = 5, 10
DIMS = ["valence", "arousal", "dominance"]
CODES = ["V", "A", "D"]


def load_lexicon(path, removed):
    lex = {}
    with open(path) as f:
        next(f)
        for line in f:
            w, v, a, d = line.rstrip("\n").split("\t")
            if w in removed:
                continue
            lex[w] = (float(v), float(a), float(d))
    return lex


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return repr(x)


def make_corpus(lex_words, removed):
    rng = random.Random(99)
    fillers = ["the", "a", "and", "to", "is", "it", "so", "#blessed", "@pal", "!", "...", ":)"]
    speakers = [("u1", "CA", "Toronto", 40, 2020), ("u2", "US", "Boston", 35, 2020),
                ("u3", "US", "Seattle", 30, None), ("u4", "CA", "Vancouver", 5, 2020),
                ("u5", "CA", "Toronto", 12, 2020)]
    recs = []
    tid = 5000
    for spk, country, city, n, year in speakers:
        base = datetime(2020, 1, 1, tzinfo=timezone.utc)
        for i in range(n):
            if year is None:
                when = base + timedelta(days=25 * i, hours=rng.randrange(24))
            else:
                when = base + timedelta(days=8 * i + rng.randrange(3), hours=rng.randrange(24))
            k = rng.randrange(3, 12)
            toks = []
            for _ in range(k):
                r = rng.random()
                if r < 0.45:
                    w = rng.choice(lex_words)
                    toks.append(w.capitalize() if rng.random() < 0.1 else w)
                elif r < 0.55:
                    toks.append(rng.choice(removed))
                else:
                    toks.append(rng.choice(fillers))
            if spk == "u5":
                toks = ["okay", "the", "okay"]  # constant stream
            tid += 1
            recs.append({
                "tweet_id": str(tid), "speaker_id": spk,
                "created_at": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "country": country, "city": city, "language": "en", "is_retweet": False,
                "has_url_or_media": False, "text": " ".join(toks), "tokens": toks,
                "day_key": {"speaker_id": spk, "date": when.date().isoformat()},
            })
    rng.shuffle(recs)
    return recs


def ts(r):
    return datetime.strptime(r["created_at"], "%Y-%m-%dT%H:%M:%SZ")


def tweet_score(toks, lex):
    out = []
    for d in range(3):
        vals = []
        for t in toks:
            e = lex.get(t.lower())
            if e is not None and (e[d] <= LOW or e[d] >= HIGH):
                vals.append(e[d])
        out.append(vals)
    return out


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def aggregates(recs, lex, keyfn, key_cols, path):
    groups = {}
    for r in recs:
        groups.setdefault(keyfn(r), []).append(tweet_score(r["tokens"], lex))
    rows = []
    for key in sorted(groups):
        scored = groups[key]
        row = list(key) + [str(len(scored))]
        for d in range(3):
            means = [math.fsum(s[d]) / len(s[d]) for s in scored if s[d]]
            n_low = sum(1 for s in scored if any(v <= LOW for v in s[d]))
            n_high = sum(1 for s in scored if any(v >= HIGH for v in s[d]))
            row += [fmt(math.fsum(means) / len(means) if means else None), str(len(means)),
                    fmt(100.0 * n_low / len(scored)), fmt(100.0 * n_high / len(scored))]
        rows.append(row)
    header = key_cols + ["tweets"]
    for c in CODES:
        header += [c + "_mean", c + "_n_scored", c + "_pct_low", c + "_pct_high"]
    write_csv(path, header, rows)


def side_of(v, vals):
    # Exact test of (v - mean)^2 > sample variance, so states sitting on a
    # home boundary are never pushed out by rounding.
    n = len(vals)
    if n < 2:
        return None
    fs = [Fraction(x) for x in vals]
    S, Q, fv = sum(fs), sum(x * x for x in fs), Fraction(v)
    if (n * fv - S) ** 2 * (n - 1) <= n * (n * Q - S * S):
        return None
    return "high" if n * fv > S else "low"


def excursions(states):
    vals = [v for _, v in states]
    out, cur = [], None
    for idx, v in states:
        side = side_of(v, vals)
        if cur is not None and side != cur["dir"]:
            cur["reentry"] = idx
            out.append(cur)
            cur = None
        if side is None:
            continue
        if cur is None:
            cur = {"dir": side, "exit": idx, "peak": idx, "pv": v, "reentry": None}
        elif (side == "high" and v > cur["pv"]) or (side == "low" and v < cur["pv"]):
            cur["peak"], cur["pv"] = idx, v
    if cur is not None:
        out.append(cur)
    return out


def mean_or_none(xs):
    return math.fsum(xs) / len(xs) if xs else None


def profiles(recs, lex, path, skip_path):
    by = {}
    for r in recs:
        by.setdefault(r["speaker_id"], []).append(r)
    rows, skipped = [], []
    for spk in sorted(by):
        tw = sorted(by[spk], key=lambda r: (ts(r), r["tweet_id"]))
        if len(tw) < MIN_TWEETS:
            skipped.append([spk, str(len(tw)), "min_tweets"])
            continue
        toks = [t for r in tw for t in r["tokens"]]
        years = {ts(r).year for r in tw}
        countries = {}
        for r in tw:
            countries[r["country"]] = countries.get(r["country"], 0) + 1
        country = sorted(countries.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        year = str(years.pop()) if len(years) == 1 else ""
        for d in range(3):
            states, n_windows = [], 0
            for s in range(len(toks) - WINDOW + 1):
                n_windows += 1
                hits = [lex[t.lower()][d] for t in toks[s:s + WINDOW] if t.lower() in lex]
                if hits:
                    states.append((s, math.fsum(hits) / len(hits)))
            vals = [v for _, v in states]
            if len(set(vals)) == 1:
                mean, sd = vals[0], 0.0
            else:
                mean = math.fsum(vals) / len(vals)
                sd = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
            lo, hi = mean - sd, mean + sd
            ex = excursions(states)
            rise, rec, hm_hi, hi_hm, hm_lo, lo_hm = [], [], [], [], [], []
            for e in ex:
                disp = e["pv"] - hi if e["dir"] == "high" else lo - e["pv"]
                r_ = disp / (e["peak"] - e["exit"] + 1)
                rise.append(r_)
                (hm_hi if e["dir"] == "high" else hm_lo).append(r_)
                if e["reentry"] is not None:
                    c_ = disp / (e["reentry"] - e["peak"])
                    rec.append(c_)
                    (hi_hm if e["dir"] == "high" else lo_hm).append(c_)
            rows.append([spk, country, year, str(len(tw)), DIMS[d], fmt(mean), fmt(sd), fmt(lo),
                         fmt(hi), str(len(states)), fmt(len(states) / n_windows), str(len(ex)),
                         fmt(mean_or_none(rise)), fmt(mean_or_none(rec)),
                         fmt(mean_or_none(hm_hi)), fmt(mean_or_none(hi_hm)),
                         fmt(mean_or_none(hm_lo)), fmt(mean_or_none(lo_hm))])
    write_csv(path, ["speaker", "country", "year", "n_tweets", "dimension", "mean", "variability",
                     "home_low", "home_high", "n_states", "coverage", "n_excursions", "rise_rate",
                     "recovery_rate", "rate_hm_hi", "rate_hi_hm", "rate_hm_lo", "rate_lo_hm"], rows)
    write_csv(skip_path, ["speaker", "n_tweets", "reason"], skipped)
    return rows


def compare(rows, path):
    va = {r[0]: float(r[5]) for r in rows if r[4] == "valence"}
    vb = {r[0]: float(r[5]) for r in rows if r[4] == "arousal"}
    keys = sorted(va)
    a = [va[k] for k in keys]
    b = [vb[k] for k in keys]
    res = stats.ttest_rel(a, b)
    diff = [x - y for x, y in zip(a, b)]
    write_csv(path, ["comparison", "n", "mean_diff", "t", "df", "p", "significant"],
              [["mean", str(len(a)), fmt(math.fsum(diff) / len(diff)), fmt(float(res.statistic)),
                str(len(a) - 1), fmt(float(res.pvalue)), "true" if res.pvalue < 0.001 else "false"]])


def main(out_dir):
    out = Path(out_dir)
    removed = [l.strip() for l in open(Path(__file__).resolve().parent.parent.parent / "data" / "removed_terms.txt")
               if l.strip() and not l.startswith("#")]
    lex = load_lexicon(out / "vad_fixture.tsv", set(removed))
    recs = make_corpus(sorted(lex), removed)
    with open(out / "ued_corpus.jsonl", "w") as f:
        for r in recs:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")
    year = lambda r: str(ts(r).year)
    aggregates(recs, lex, lambda r: (r["country"], year(r)), ["country", "year"],
               out / "score_expected.aggregates.csv")
    aggregates(recs, lex, lambda r: (r["country"], year(r), "%02d" % ts(r).month),
               ["country", "year", "month"], out / "score_expected.monthly.csv")
    rows = profiles(recs, lex, out / "ued_expected.csv", out / "ued_expected.skipped.csv")
    compare(rows, out / "compare_expected.csv")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).parent.parent / "data"))

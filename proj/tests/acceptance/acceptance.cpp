// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: ieikit_acceptance [criterion numbers...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ieikit/fixture.hpp"
#include "ieikit/iei.hpp"
#include "ieikit/ood_split.hpp"
#include "ieikit/probe.hpp"
#include "ieikit/report.hpp"
#include "ieikit/selection.hpp"
#include "ieikit/table.hpp"

namespace fs = std::filesystem;
using namespace ieikit;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Independent oracles ------------------------------------------------------

EmbeddingTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t dim, std::size_t classes) {
    std::normal_distribution<double> g(0.0, 2.0);
    std::vector<TableRow> rows;
    std::set<SampleId> ids;
    while (ids.size() < n) ids.insert(rng() % (5 * n + 5));
    std::size_t i = 0;
    for (SampleId id : ids) {
        TableRow r{id, static_cast<ClassLabel>(i < classes ? i : rng() % classes), {}, {}};
        for (std::size_t d = 0; d < dim; ++d) r.features.push_back(static_cast<float>(g(rng)));
        rows.push_back(std::move(r));
        ++i;
    }
    return make_table(std::move(rows), dim, classes, false);
}

std::vector<double> oracle_mean(const EmbeddingTable& t, std::size_t c) {
    std::vector<double> sum(t.dim, 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.labels[i] != c) continue;
        ++n;
        for (std::size_t d = 0; d < t.dim; ++d) sum[d] += t.feature_row(i)[d];
    }
    for (double& s : sum) s /= static_cast<double>(n);
    return sum;
}

double oracle_distance(std::span<const float> x, const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t d = 0; d < p.size(); ++d) s += std::pow(static_cast<double>(x[d]) - p[d], 2);
    return std::sqrt(s);
}

double oracle_entropy(const std::vector<double>& logits) {
    // Direct definition without max-shift; inputs are kept small.
    double z = 0.0;
    for (double v : logits) z += std::exp(v);
    double h = 0.0;
    for (double v : logits) {
        const double p = std::exp(v) / z;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

ScoreTable random_scores(std::mt19937_64& rng, std::size_t n, std::size_t classes, bool ties) {
    ScoreTable s;
    s.n_classes = classes;
    std::set<SampleId> ids;
    while (ids.size() < n) ids.insert(rng() % (4 * n + 4));
    s.sample_ids.assign(ids.begin(), ids.end());
    std::shuffle(s.sample_ids.begin(), s.sample_ids.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
        s.labels.push_back(static_cast<ClassLabel>(i < classes ? i : rng() % classes));
        s.scores.push_back(ties ? static_cast<double>(rng() % 4) : std::ldexp(static_cast<double>(rng() >> 11), -53));
    }
    return s;
}

std::set<SampleId> oracle_select(const ScoreTable& s, const std::vector<std::size_t>& budget, Direction dir) {
    std::set<SampleId> out;
    for (std::size_t c = 0; c < s.n_classes; ++c) {
        std::vector<std::pair<double, SampleId>> rows;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.labels[i] == c) rows.emplace_back(dir == Direction::goodset ? -s.scores[i] : s.scores[i], s.sample_ids[i]);
        }
        std::stable_sort(rows.begin(), rows.end());
        for (std::size_t k = 0; k < budget[c]; ++k) out.insert(rows[k].second);
    }
    return out;
}

/// Largest-remainder split of `total` over `weights`, remainder ties to the lower index.
std::vector<std::size_t> oracle_apportion(const std::vector<double>& weights, std::size_t total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> out(weights.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double q = static_cast<double>(total) * weights[c] / sum;
        out[c] = static_cast<std::size_t>(std::floor(q));
        given += out[c];
        rem.emplace_back(-(q - std::floor(q)), c);
    }
    std::sort(rem.begin(), rem.end());
    for (std::size_t k = 0; given < total; ++k, ++given) ++out[rem[k].second];
    return out;
}

// Criteria -----------------------------------------------------------------

Outcome exactness() {
    Outcome o;
    const std::vector<double> uniform(10, 0.1);
    o.require(std::abs(shannon_entropy(uniform) - std::log2(10.0)) <= 1e-9, "uniform entropy");
    std::vector<double> one_hot(10, 0.0);
    one_hot[3] = 1.0;
    o.require(shannon_entropy(one_hot) == 0.0, "one-hot entropy");

    std::mt19937_64 rng(20240601);
    // Logits on a dyadic grid keep x + c - (max + c) exact.
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(1 + rng() % 12);
        for (double& v : x) v = static_cast<double>(static_cast<std::int64_t>(rng() % 4001) - 2000) / 256.0;
        for (double c : {1.0, -64.0, 1024.0, 3.5}) {
            std::vector<double> y = x;
            for (double& v : y) v += c;
            o.require(softmax(x) == softmax(y), "softmax shift invariance");
            o.require(prototype_probabilities(x) == prototype_probabilities(y), "distance softmax shift invariance");
        }
    }

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t classes = 2 + rng() % 9;
        const auto t = random_table(rng, classes + rng() % (1000 - classes), 1 + rng() % 24, classes);
        const auto protos = class_prototypes(t);
        std::vector<std::vector<double>> means;
        for (std::size_t c = 0; c < classes; ++c) {
            means.push_back(oracle_mean(t, c));
            for (std::size_t d = 0; d < t.dim; ++d) worst = std::max(worst, std::abs(protos.vector(c)[d] - means[c][d]));
        }
        const auto metric = metric_scores(t, protos);
        const auto de = distance_entropy_scores(t, protos);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto dv = distance_vector(t.feature_row(i), protos);
            std::vector<double> neg;
            for (std::size_t c = 0; c < classes; ++c) {
                const double od = oracle_distance(t.feature_row(i), means[c]);
                worst = std::max(worst, std::abs(dv[c] - od));
                neg.push_back(-od);
            }
            worst = std::max(worst, std::abs(metric.scores[i] - oracle_distance(t.feature_row(i), means[t.labels[i]])));
            worst = std::max(worst, std::abs(de.scores[i] - oracle_entropy(neg)));
        }
        const auto stats = class_distribution_stats(metric);
        for (std::size_t c = 0; c < classes; ++c) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (t.labels[i] == c) xs.push_back(metric.scores[i]);
            }
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= static_cast<double>(xs.size());
            worst = std::max(worst, std::abs(stats.classes[c].mean - mean));
            worst = std::max(worst, std::abs(stats.classes[c].variance - var));
        }
        const std::size_t budget = 1 + rng() % t.size();
        const auto plan = select(metric, {BudgetKind::balanced, budget}, Direction::goodset, aci(stats));
        o.require(std::set<SampleId>(plan.selected_ids.begin(), plan.selected_ids.end()) ==
                      oracle_select(metric, plan.per_class_budget, Direction::goodset),
                  "selection oracle");
    }
    o.require(worst <= 1e-6, "oracle deviation " + fmt("%.3g", worst));
    if (o.pass) o.detail = "max oracle deviation " + fmt("%.2g", worst);
    return o;
}

Outcome selection_oracle() {
    Outcome o;
    std::mt19937_64 rng(777);
    std::size_t checked_budgets = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t classes = 1 + rng() % 10;
        const auto s = random_scores(rng, classes + rng() % (1000 - classes + 1), classes, trial % 2 == 0);
        const auto stats = aci(class_distribution_stats(s));
        const std::size_t budget = 1 + rng() % s.size();
        for (auto kind : {BudgetKind::balanced, BudgetKind::unbalanced}) {
            for (auto dir : {Direction::goodset, Direction::badset}) {
                const auto plan = select(s, {kind, budget}, dir, stats);
                o.require(plan.selected_ids.size() == budget, "plan size");
                o.require(std::set<SampleId>(plan.selected_ids.begin(), plan.selected_ids.end()) ==
                              oracle_select(s, plan.per_class_budget, dir),
                          "id set differs from the oracle");
                if (!plan.class_capped) {
                    std::vector<double> w;
                    for (const auto& c : stats.classes) {
                        w.push_back(kind == BudgetKind::balanced ? 1.0 : std::max(c.mean, 0.0) + 1e-6);
                    }
                    o.require(plan.per_class_budget == oracle_apportion(w, budget), "budget apportionment");
                    ++checked_budgets;
                }
            }
        }
    }
    if (o.pass) o.detail = "400 plans equal the oracle; " + std::to_string(checked_budgets) + " uncapped budgets checked";
    return o;
}

struct MeanCurves {
    std::vector<double> hid;
    std::vector<double> lid;
};

MeanCurves paired_curves(const MixtureSpec& spec, Indicator indicator, bool adding, int seeds) {
    MeanCurves m{std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)};
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 42 + static_cast<std::uint64_t>(s);
        const auto f = make_iid_fixture(spec, 500, 200, seed);
        LoopOptions o;
        o.indicator = indicator;
        o.round_budget = 500;
        o.rounds = 9;
        o.probe.seed = seed;
        CurveRecord hid, lid;
        if (adding) {
            const auto [base, pool] = random_base_split(f.universe, 0.1, seed);
            o.direction = Direction::goodset;
            hid = addition_loop(base, pool, f.eval, o);
            o.direction = Direction::badset;
            lid = addition_loop(base, pool, f.eval, o);
        } else {
            o.direction = Direction::badset;
            hid = reduction_loop(f.universe, f.eval, o);
            o.direction = Direction::goodset;
            lid = reduction_loop(f.universe, f.eval, o);
        }
        for (std::size_t r = 0; r < 10; ++r) {
            m.hid[r] += hid.rounds[r].accuracy / seeds;
            m.lid[r] += lid.rounds[r].accuracy / seeds;
        }
    }
    return m;
}

MixtureSpec iid_spec() {
    MixtureSpec spec;
    spec.n_classes = 10;
    spec.dim = 16;
    spec.separation = 3.0;
    spec.anisotropy = 1.0;
    return spec;
}

Outcome iid_dominance() {
    Outcome o;
    std::ostringstream detail;
    for (bool adding : {true, false}) {
        // Mid-budget: train size 2,500 of 5,000 (addition round 4, reduction round 5).
        const std::size_t mid = adding ? 4 : 5;
        for (Indicator ind : {Indicator::distance_entropy, Indicator::probability_entropy, Indicator::metric}) {
            const auto m = paired_curves(iid_spec(), ind, adding, 5);
            const std::string tag = std::string(adding ? "add/" : "reduce/") + std::string(indicator_name(ind));
            double min_gap = 1.0;
            for (std::size_t r = 1; r < 9; ++r) min_gap = std::min(min_gap, m.hid[r] - m.lid[r]);
            const double mid_gap = m.hid[mid] - m.lid[mid];
            o.require(min_gap >= 0.0, tag + " HID below LID at an intermediate round");
            o.require(mid_gap >= 0.02, tag + " mid-budget gap " + fmt("%.4f", mid_gap));
            if (adding) {
                const double end_gap = std::abs(m.hid[9] - m.lid[9]);
                o.require(end_gap <= 0.001, tag + " full-budget gap " + fmt("%.4f", end_gap));
            }
            detail << tag << " mid " << fmt("%+.3f", mid_gap) << " min " << fmt("%+.3f", min_gap) << "; ";
        }
    }
    if (o.pass) o.detail = detail.str();
    return o;
}

double curve_area(const CurveRecord& c) {
    const auto acc = c.accuracies();
    double a = 0.0;
    for (std::size_t i = 1; i < acc.size(); ++i) a += 0.5 * (acc[i] + acc[i - 1]);
    return a / static_cast<double>(acc.size() - 1);
}

MixtureSpec heterogeneous_spec() {
    MixtureSpec spec;
    spec.n_classes = 10;
    spec.dim = 16;
    spec.separation = 3.0;
    spec.anisotropy = 0.0;
    spec.separation_spread = 0.5;
    return spec;
}

Outcome budget_ordering() {
    Outcome o;
    double ug = 0, bg = 0, bb = 0, ub = 0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 42 + static_cast<std::uint64_t>(s);
        const auto f = make_iid_fixture(heterogeneous_spec(), 500, 200, seed);
        const auto [base, pool] = random_base_split(f.universe, 0.1, seed);
        LoopOptions lo;
        lo.indicator = Indicator::probability_entropy;
        lo.round_budget = 500;
        lo.rounds = 9;
        lo.probe.seed = seed;
        auto run = [&](BudgetKind k, Direction d) {
            lo.scheme = k;
            lo.direction = d;
            return curve_area(addition_loop(base, pool, f.eval, lo)) / seeds;
        };
        ug += run(BudgetKind::unbalanced, Direction::goodset);
        bg += run(BudgetKind::balanced, Direction::goodset);
        bb += run(BudgetKind::balanced, Direction::badset);
        ub += run(BudgetKind::unbalanced, Direction::badset);
    }
    o.require(ug >= bg && bg > bb && bb >= ub, "ordering violated");
    o.detail = "AUC unbalanced-goodset " + fmt("%.4f", ug) + " balanced-goodset " + fmt("%.4f", bg) +
               " balanced-badset " + fmt("%.4f", bb) + " unbalanced-badset " + fmt("%.4f", ub);
    return o;
}

Outcome ood_benefit() {
    Outcome o;
    MixtureSpec spec;
    spec.anisotropy = 1.0;
    double pos = 0.0, neg = 0.0;
    const int seeds = 3;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 42 + static_cast<std::uint64_t>(s);
        const auto f = make_ood_fixture(spec, 500, 400, 2.0, seed);
        // Half of the test domain builds the prototypes, the other half is scored.
        std::vector<SampleId> reference, held_out;
        for (std::size_t i = 0; i < f.test.size(); ++i) (i % 2 == 0 ? reference : held_out).push_back(f.test.sample_ids[i]);
        const auto eval = subset(f.test, held_out);
        const auto split = migration_split(migration_distances(f.train, test_domain_prototypes(subset(f.test, reference))), 0.4);
        ProbeConfig cfg;
        cfg.seed = seed;
        pos += evaluate(fit_linear_probe(subset(f.train, split.positive_ids), cfg), eval) / seeds;
        neg += evaluate(fit_linear_probe(subset(f.train, split.negative_ids), cfg), eval) / seeds;
    }
    o.require(pos - neg >= 0.02, "gap below 2 points");
    o.detail = "positive " + fmt("%.4f", pos) + " negative " + fmt("%.4f", neg) + " gap " + fmt("%+.4f", pos - neg);
    return o;
}

// Plain objective for the finite-difference oracle.
double objective(const EmbeddingTable& t, const std::vector<double>& w, double l2) {
    const std::size_t C = t.n_classes, D = t.dim;
    double total = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> z(C);
        double lse = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            z[c] = w[C * D + c];
            for (std::size_t d = 0; d < D; ++d) z[c] += w[c * D + d] * t.feature_row(i)[d];
            lse += std::exp(z[c]);
        }
        total += std::log(lse) - z[t.labels[i]];
    }
    double reg = 0.0;
    for (std::size_t k = 0; k < C * D; ++k) reg += w[k] * w[k];
    return total / static_cast<double>(t.size()) + 0.5 * l2 * reg;
}

Outcome probe_numerics() {
    Outcome o;
    std::mt19937_64 rng(4);
    const auto toy = random_table(rng, 60, 4, 3);
    std::normal_distribution<double> g(0.0, 0.8);
    double worst = 0.0;
    for (int point = 0; point < 20; ++point) {
        std::vector<double> w(3 * 4 + 3);
        for (double& v : w) v = g(rng);
        const auto lg = linear_loss_and_gradient(toy, w, 1e-2);
        for (std::size_t k = 0; k < w.size(); ++k) {
            auto up = w, down = w;
            up[k] += 1e-5;
            down[k] -= 1e-5;
            const double fd = (objective(toy, up, 1e-2) - objective(toy, down, 1e-2)) / 2e-5;
            worst = std::max(worst, std::abs(fd - lg.gradient[k]) /
                                        std::max({std::abs(fd), std::abs(lg.gradient[k]), 1e-8}));
        }
    }
    o.require(worst <= 1e-5, "gradient relative error " + fmt("%.3g", worst));

    std::size_t epochs = 0;
    auto monotone = [&](const EmbeddingTable& t, const std::string& name) {
        const auto m = fit_linear_probe(t);
        for (std::size_t k = 1; k < m.loss_history.size(); ++k) {
            o.require(m.loss_history[k] <= m.loss_history[k - 1], name + " loss increased at epoch " + std::to_string(k));
        }
        epochs += m.loss_history.size() - 1;
    };
    for (std::uint64_t seed : {42u, 43u}) {
        monotone(make_iid_fixture(iid_spec(), 500, 1, seed).universe, "iid fixture");
        monotone(make_iid_fixture(heterogeneous_spec(), 500, 1, seed).universe, "heterogeneous fixture");
        MixtureSpec ood;
        ood.anisotropy = 1.0;
        monotone(make_ood_fixture(ood, 500, 1, 2.0, seed).train, "ood fixture");
    }
    if (o.pass) {
        o.detail = "max gradient relative error " + fmt("%.2g", worst) + "; " + std::to_string(epochs) +
                   " epochs non-increasing";
    }
    return o;
}

// CLI determinism ----------------------------------------------------------

int shell(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const fs::path& p) {
    const auto bytes = read_file(p);
    return {bytes.begin(), bytes.end()};
}

Outcome cli_determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "ieikit_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = std::string("cd '") + dir.string() + "' && '" + IEIKIT_CLI_PATH + "' ";
    const std::string quiet = " >/dev/null 2>&1";

    struct Case {
        std::string args;
        std::string config_source;
        std::vector<std::string> outputs;
    };
    const std::vector<Case> cases{
        {"gen-fixture --out-dir fx --classes 4 --dim 6 --per-class 60 --eval-per-class 30 --logits --seed 7",
         "fx/universe.emb1", {"fx/universe.emb1", "fx/eval.emb1"}},
        {"gen-fixture --out-dir ood --classes 4 --dim 6 --per-class 60 --eval-per-class 30 --shift 2",
         "ood/test.emb1", {"ood/train.emb1", "ood/test.emb1"}},
        {"score --in fx/universe.emb1 --indicator entropy --out s.csv --stats st.json", "s.csv", {"s.csv", "st.json"}},
        {"score --in fx/universe.emb1 --indicator metric --out m.json", "m.json", {"m.json"}},
        {"select --scores s.csv --budget 40 --scheme unbalanced --direction badset --out plan.json", "plan.json",
         {"plan.json"}},
        {"stats --scores s.csv --out stats.json", "stats.json", {"stats.json"}},
        {"simulate add --universe fx/universe.emb1 --eval fx/eval.emb1 --out-dir sim --budget 0.1 --rounds 4 "
         "--epochs 50",
         "sim/LID.csv",
         {"sim/HID.csv", "sim/HID.json", "sim/LID.csv", "sim/LID.json", "sim/random.csv", "sim/random.json"}},
        {"simulate reduce --universe fx/universe.emb1 --eval fx/eval.emb1 --out-dir simr --budget 24 --rounds 4 "
         "--indicator metric --probe nearest-prototype --arms HID,LID",
         "simr/HID.json", {"simr/HID.csv", "simr/HID.json", "simr/LID.csv", "simr/LID.json"}},
        {"split --train ood/train.emb1 --test ood/test.emb1 --out-dir sp", "sp/manifest.json",
         {"sp/positive.emb1", "sp/negative.emb1", "sp/manifest.json"}},
        {"eval --train sp/positive.emb1 --test ood/test.emb1 --repeats 3 --out ev.json", "ev.json", {"ev.json"}},
        {"convert --in fx/eval.emb1 --out e.csv", "e.csv", {"e.csv"}},
        {"convert --in e.csv --out e.emb1 --logits", "e.emb1", {"e.emb1"}},
    };

    std::size_t files = 0;
    for (const auto& c : cases) {
        const std::string name = c.args.substr(0, c.args.find(' '));
        if (shell(cli + c.args + quiet) != 0) {
            o.require(false, "command failed: " + c.args);
            break;
        }
        std::map<std::string, std::string> first;
        for (const auto& out : c.outputs) {
            first[out] = slurp(dir / out);
            o.require(first[out].find(std::string(kToolkitVersion)) != std::string::npos,
                      out + " lacks the embedded config");
        }
        // Re-run from the config embedded in one output, after deleting every output.
        const std::string source = (dir / c.config_source).string() + ".config";
        fs::copy_file(dir / c.config_source, source, fs::copy_options::overwrite_existing);
        for (const auto& out : c.outputs) fs::remove(dir / out);
        if (shell(cli + name + " --config '" + source + "'" + quiet) != 0) {
            o.require(false, "re-run failed: " + name);
            break;
        }
        for (const auto& out : c.outputs) {
            o.require(fs::exists(dir / out) && slurp(dir / out) == first[out], out + " differs on re-run");
            ++files;
        }
    }
    if (o.pass) o.detail = std::to_string(cases.size()) + " commands, " + std::to_string(files) + " files byte-identical";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "exactness suite", 10.0, exactness},
        {2, "selection oracle", 30.0, selection_oracle},
        {3, "IID dominance", 300.0, iid_dominance},
        {4, "budget-scheme ordering", 300.0, budget_ordering},
        {5, "OOD split benefit", 60.0, ood_benefit},
        {6, "probe numerics", 60.0, probe_numerics},
        {7, "determinism", 120.0, cli_determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) out.require(false, "runtime over " + fmt("%.0f s", c.limit_seconds));
        std::printf("[%s] criterion %d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}

#include "tracerec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracerec/corpus.hpp"
#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/io.hpp"
#include "tracerec/metrics.hpp"
#include "tracerec/recovery.hpp"
#include "tracerec/report.hpp"
#include "tracerec/stats.hpp"
#include "tracerec/synth.hpp"
#include "tracerec/textprep.hpp"
#include "tracerec/version.hpp"

namespace tracerec {

namespace {

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(sep, start);
        if (end == std::string::npos) end = text.size();
        auto item = text.substr(start, end - start);
        if (item.empty()) throw ValidationError("empty item in list '" + text + "'");
        items.push_back(std::move(item));
        start = end + 1;
    }
    return items;
}

struct PrepFlags {
    std::size_t min_token_length = 2;
    bool keep_numeric = false;
    bool keep_stopwords = false;
    bool no_stem = false;
    std::string stoplist;

    void attach(CLI::App* sub) {
        sub->add_option("--min-token-length", min_token_length, "Drop tokens shorter than this")
            ->capture_default_str();
        sub->add_flag("--keep-numeric", keep_numeric, "Keep purely numeric tokens");
        sub->add_flag("--keep-stopwords", keep_stopwords, "Disable stop-word removal");
        sub->add_flag("--no-stem", no_stem, "Disable Porter stemming");
        sub->add_option("--stoplist", stoplist, "Stop list file (one word per line)");
    }

    [[nodiscard]] PrepConfig config() const {
        PrepConfig c;
        c.min_token_length = min_token_length;
        c.drop_numeric = !keep_numeric;
        c.remove_stopwords = !keep_stopwords;
        c.stem = !no_stem;
        c.stoplist_path = stoplist;
        return c;
    }
};

struct TraceArgs {
    std::string manifest, sources, targets, model, cutoff, out;
    std::optional<std::size_t> k;
    std::optional<double> lambda;
    bool allow_empty = false;
    PrepFlags prep;
};

struct EvalArgs {
    std::string run, gold, cuts = "5,10,15,30,100,200", quality, out, plot_data;
};

struct CompareArgs {
    std::string a, b, metric, mc, out;
    double delta = 0.0;
    double alpha = 0.0;
};

struct CharacterizeArgs {
    std::string manifest, gold, context, out;
    bool allow_empty = false;
    PrepFlags prep;
};

struct SynthArgs {
    std::string spec, out;
};

struct ReportArgs {
    std::string manifest, gold, run, out, context, cuts = "5,10,15,30,100,200", quality, compare_with, metric;
    std::optional<double> delta, alpha;
    bool chance = false;
    bool allow_empty = false;
    PrepFlags prep;
};

void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_file_atomic(path, content);
    }
}

int do_trace(const TraceArgs& a, std::ostream& out) {
    const auto set = load_manifest(a.manifest, {a.allow_empty});
    RecoveryConfig rc;
    rc.source_kinds = split_list(a.sources);
    rc.target_kinds = split_list(a.targets);
    rc.model.kind = parse_model_kind(a.model);
    if (a.k) {
        if (rc.model.kind != ModelKind::lsi) throw ValidationError("--k applies only to --model lsi");
        rc.model.lsi_k = *a.k;
    }
    if (a.lambda) {
        if (rc.model.kind != ModelKind::lm) throw ValidationError("--lambda applies only to --model lm");
        rc.model.lambda = *a.lambda;
    }
    rc.cutoff = parse_cutoff(a.cutoff);
    rc.prep = a.prep.config();
    const auto run = recover(set, rc);
    write_run(run, a.out);
    std::size_t links = 0;
    for (const auto& [source, entries] : run.entries) links += entries.size();
    out << "wrote " << links << " candidate links for " << run.entries.size() << " sources to " << a.out << "\n";
    return 0;
}

MetricsReport evaluate_files(const std::string& run_path, const GoldStandard& gold, const std::string& cuts,
                             const std::string& quality_path) {
    const auto run = read_run(run_path);
    std::optional<QualityConfig> quality;
    if (!quality_path.empty()) quality = parse_quality_config(read_text_file(quality_path));
    return evaluate(run, gold, parse_cuts(cuts), quality);
}

int do_eval(const EvalArgs& a, std::ostream& out) {
    const auto report = evaluate_files(a.run, read_gold(a.gold), a.cuts, a.quality);
    write_file_atomic(a.out, metrics_to_json(report));
    if (!a.plot_data.empty()) write_file_atomic(a.plot_data, emit_pr_plot_data(report));
    char buf[128];
    std::snprintf(buf, sizeof buf, "sources=%zu excluded=%zu MAP=%s\n", report.sources.size(),
                  report.excluded_sources.size(), format_score(report.macro.map).c_str());
    out << buf;
    return 0;
}

std::pair<std::size_t, std::uint64_t> parse_mc(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw ValidationError("--mc needs 'm,seed'; the seed must be given explicitly");
    }
    auto number = [&](std::string_view s, auto& value) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
            throw ValidationError("invalid --mc value '" + text + "'");
        }
    };
    std::size_t m = 0;
    std::uint64_t seed = 0;
    number(std::string_view(text).substr(0, comma), m);
    number(std::string_view(text).substr(comma + 1), seed);
    return {m, seed};
}

int do_compare(const CompareArgs& a, std::ostream& out) {
    const auto ra = parse_metrics_report(read_text_file(a.a));
    const auto rb = parse_metrics_report(read_text_file(a.b));
    auto report = compare_runs(ra, rb, a.metric, a.delta, a.alpha);
    if (!a.mc.empty()) {
        const auto [m, seed] = parse_mc(a.mc);
        report.permutation = paired_permutation_pvalue(report.differences, m, seed);
    }
    write_or_print(a.out, comparison_to_json(report), out);
    return 0;
}

int do_characterize(const CharacterizeArgs& a, std::ostream&) {
    const auto set = load_manifest(a.manifest, {a.allow_empty});
    const auto gold = load_gold(a.gold, set);
    const auto profile = characterize(set, gold, Preprocessor(a.prep.config()), a.context);
    write_file_atomic(a.out, profile_to_json(profile));
    return 0;
}

int do_gen_synthetic(const SynthArgs& a, std::ostream& out) {
    const auto spec = parse_synth_spec(read_text_file(a.spec));
    const auto corpus = gen_synthetic(spec);
    write_synthetic(corpus, a.out);
    write_file_atomic(std::filesystem::path(a.out) / "spec.json", format_synth_spec(spec));
    out << "wrote " << corpus.artifacts.size() << " artifacts and " << corpus.gold.size() << " gold links to "
        << a.out << "\n";
    return 0;
}

int do_report(const ReportArgs& a, std::ostream&) {
    const auto set = load_manifest(a.manifest, {a.allow_empty});
    const auto gold = load_gold(a.gold, set);
    const auto run = read_run(a.run);
    const Preprocessor prep(a.prep.config());

    ExperimentReport r;
    r.tool = std::string(kToolName) + " " + std::string(kVersion);
    r.context = a.context;
    r.manifest_fingerprint = set.fingerprint();
    r.gold_fingerprint = gold.fingerprint();
    r.run_tag = run.tag;
    r.configuration = parse_tag(run.tag);
    if (auto it = r.configuration.find("corpus"); it != r.configuration.end() && it->second != r.manifest_fingerprint) {
        throw ValidationError("run was produced from a different corpus (run " + it->second + ", manifest " +
                              r.manifest_fingerprint + ")");
    }
    const auto prep_fields = parse_tag(prep.describe());
    for (const auto& [key, value] : prep_fields) {
        auto it = r.configuration.find(key);
        if (it != r.configuration.end() && it->second != value) {
            throw ValidationError("preprocessing '" + key + "=" + value + "' differs from the run's '" + key + "=" +
                                  it->second + "'");
        }
    }
    r.profile = characterize(set, gold, prep, a.context);
    std::optional<QualityConfig> quality;
    if (!a.quality.empty()) quality = parse_quality_config(read_text_file(a.quality));
    r.metrics = evaluate(run, gold, parse_cuts(a.cuts), quality);

    if (a.chance) {
        auto targets_it = r.configuration.find("targets");
        if (targets_it == r.configuration.end()) {
            throw ValidationError("chance baselines need a run tag naming the target kinds");
        }
        const auto kinds = split_list(targets_it->second, '+');
        const auto targets = set.select(kinds);
        for (const auto& m : r.metrics.sources) {
            const bool self = targets.contains(m.source_id);
            const std::size_t n = targets.size() - (self ? 1 : 0);
            std::size_t relevant = 0;
            for (const auto& id : gold.relevant_for(m.source_id)) relevant += (targets.contains(id) && id != m.source_id);
            SourceChance c;
            c.source_id = m.source_id;
            c.baseline = chance_baseline(n, relevant, m.retrieved);
            c.observed_hits = m.hits;
            c.p_value = chance_pvalue(n, relevant, m.retrieved, std::min(m.hits, std::min(relevant, m.retrieved)));
            r.chance.push_back(std::move(c));
        }
    }

    if (!a.compare_with.empty()) {
        if (a.metric.empty() || !a.delta || !a.alpha) {
            throw ValidationError("--compare-with needs --metric, --delta and --alpha");
        }
        const auto other = parse_metrics_report(read_text_file(a.compare_with));
        // Compare at the serialized precision so the result matches `compare`.
        const auto self = parse_metrics_report(metrics_to_json(r.metrics));
        r.comparison = compare_runs(self, other, a.metric, *a.delta, *a.alpha);
    }
    write_file_atomic(a.out, experiment_to_json(r));
    return 0;
}

// Expands `--config FILE` into flags placed before the user's own flags, so
// that explicit flags win (every option keeps its last value).
std::vector<std::string> inject_config(std::vector<std::string> args, CLI::App& app) {
    if (args.empty() || args[0].starts_with('-')) return args;
    CLI::App* sub = app.get_subcommand_no_throw(args[0]);
    if (sub == nullptr) return args;

    std::optional<std::string> config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
            config_path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!config_path) return args;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(*config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config file '" + *config_path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object of flag names");

    std::vector<std::string> expanded{args[0]};
    for (const auto& [key, value] : j.items()) {
        const auto flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || key == "config" || key == "help") {
            throw ValidationError("config key '" + key + "' is not a flag of '" + args[0] + "'");
        }
        if (value.is_boolean()) {
            expanded.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
        } else if (value.is_string()) {
            expanded.push_back(flag);
            expanded.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            expanded.push_back(flag);
            expanded.push_back(value.dump());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            expanded.push_back(flag);
            expanded.push_back(joined);
        } else {
            throw ValidationError("config key '" + key + "' has an unsupported value");
        }
    }
    expanded.insert(expanded.end(), rest.begin(), rest.end());
    return expanded;
}

class WarningsTo {
  public:
    explicit WarningsTo(std::ostream& err)
        : previous_(set_warning_sink([&err](std::string_view m) { err << "warning: " << m << "\n"; })) {}
    ~WarningsTo() { set_warning_sink(std::move(previous_)); }
    WarningsTo(const WarningsTo&) = delete;
    WarningsTo& operator=(const WarningsTo&) = delete;

  private:
    WarningSink previous_;
};

}  // namespace

int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    WarningsTo warnings(err);

    CLI::App app{"Trace link recovery and evaluation", std::string(kToolName)};
    app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kVersion));
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::string config_help = "JSON object of flag names to values; explicit flags take precedence";
    std::string unused_config;

    TraceArgs trace;
    auto* t = app.add_subcommand("trace", "Rank candidate links between two artifact kinds");
    t->add_option("--config", unused_config, config_help);
    t->add_option("--manifest", trace.manifest, "Artifact manifest (JSON)")->required();
    t->add_option("--sources", trace.sources, "Source kinds, comma separated")->required();
    t->add_option("--targets", trace.targets, "Target kinds, comma separated")->required();
    t->add_option("--model", trace.model, "vsm, lsi, lm or bim")->required();
    t->add_option("--k", trace.k, "LSI dimensions");
    t->add_option("--lambda", trace.lambda, "LM smoothing weight in [0, 1]");
    t->add_option("--cutoff", trace.cutoff, "all, topk:K or th:TAU")->required();
    t->add_option("--out", trace.out, "Run file to write (CSV)")->required();
    t->add_flag("--allow-empty", trace.allow_empty, "Accept artifacts with empty text");
    trace.prep.attach(t);

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Score a run file against a gold standard");
    e->add_option("--config", unused_config, config_help);
    e->add_option("--run", eval.run, "Run file (CSV)")->required();
    e->add_option("--gold", eval.gold, "Gold standard (CSV)")->required();
    e->add_option("--cuts", eval.cuts, "Cut levels, comma separated")->capture_default_str();
    e->add_option("--quality", eval.quality, "Quality tier thresholds (JSON)");
    e->add_option("--out", eval.out, "Metrics report to write (JSON)")->required();
    e->add_option("--plot-data", eval.plot_data, "Also write P-R plot tables here");

    CompareArgs compare;
    auto* c = app.add_subcommand("compare", "Test two metrics reports for equivalence");
    c->add_option("--config", unused_config, config_help);
    c->add_option("--a", compare.a, "First metrics report")->required();
    c->add_option("--b", compare.b, "Second metrics report")->required();
    c->add_option("--metric", compare.metric, "ap, precision, recall, f1, precision@K, recall@K or ndcg@K")
        ->required();
    c->add_option("--delta", compare.delta, "Equivalence margin")->required();
    c->add_option("--alpha", compare.alpha, "Significance level")->required();
    c->add_option("--mc", compare.mc, "Add a sign-flip permutation test: m,seed");
    c->add_option("--out", compare.out, "Comparison report to write (default stdout)");

    CharacterizeArgs charz;
    auto* ch = app.add_subcommand("characterize", "Describe a corpus and its gold standard");
    ch->add_option("--config", unused_config, config_help);
    ch->add_option("--manifest", charz.manifest, "Artifact manifest (JSON)")->required();
    ch->add_option("--gold", charz.gold, "Gold standard (CSV)")->required();
    ch->add_option("--context", charz.context, "Free-text evaluation context label");
    ch->add_option("--out", charz.out, "Profile to write (JSON)")->required();
    ch->add_flag("--allow-empty", charz.allow_empty, "Accept artifacts with empty text");
    charz.prep.attach(ch);

    SynthArgs synth;
    auto* g = app.add_subcommand("gen-synthetic", "Generate a corpus with planted links");
    g->add_option("--config", unused_config, config_help);
    g->add_option("--spec", synth.spec, "Synthetic corpus spec (JSON)")->required();
    g->add_option("--out", synth.out, "Output directory")->required();

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Assemble a full experiment report");
    r->add_option("--config", unused_config, config_help);
    r->add_option("--manifest", rep.manifest, "Artifact manifest (JSON)")->required();
    r->add_option("--gold", rep.gold, "Gold standard (CSV)")->required();
    r->add_option("--run", rep.run, "Run file (CSV)")->required();
    r->add_option("--out", rep.out, "Experiment report to write (JSON)")->required();
    r->add_option("--context", rep.context, "Free-text evaluation context label");
    r->add_option("--cuts", rep.cuts, "Cut levels, comma separated")->capture_default_str();
    r->add_option("--quality", rep.quality, "Quality tier thresholds (JSON)");
    r->add_flag("--chance", rep.chance, "Include hypergeometric chance baselines per source");
    r->add_option("--compare-with", rep.compare_with, "Metrics report of a second run to compare against");
    r->add_option("--metric", rep.metric, "Metric for --compare-with");
    r->add_option("--delta", rep.delta, "Equivalence margin for --compare-with");
    r->add_option("--alpha", rep.alpha, "Significance level for --compare-with");
    r->add_flag("--allow-empty", rep.allow_empty, "Accept artifacts with empty text");
    rep.prep.attach(r);

    try {
        args = inject_config(std::move(args), app);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            CLI::App* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
            out << active->help();
            return 0;
        } catch (const CLI::CallForVersion& v) {
            out << v.what() << "\n";
            return 0;
        } catch (const CLI::ParseError& pe) {
            err << "error: " << pe.what() << "\n";
            CLI::App* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
            err << active->help();
            return 1;
        }

        if (t->parsed()) return do_trace(trace, out);
        if (e->parsed()) return do_eval(eval, out);
        if (c->parsed()) return do_compare(compare, out);
        if (ch->parsed()) return do_characterize(charz, out);
        if (g->parsed()) return do_gen_synthetic(synth, out);
        if (r->parsed()) return do_report(rep, out);
        err << app.help();
        return 1;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return 2;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(std::move(args), out, err);
}

}  // namespace tracerec

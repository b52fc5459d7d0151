#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "remake/agent.hpp"
#include "remake/bridge.hpp"
#include "remake/config.hpp"
#include "remake/eval.hpp"
#include "remake/http_service.hpp"
#include "remake/multiwoz22.hpp"
#include "remake/replay.hpp"
#include "remake/repl.hpp"
#include "remake/session.hpp"

namespace {

using namespace remake;
using json = nlohmann::json;

struct Common {
    std::string config_file;
    std::string db_dir;
    int port = 0;
};

AppConfig resolve(const Common& c) {
    AppConfig cfg = c.config_file.empty() ? AppConfig{} : load_config(c.config_file);
    if (!c.db_dir.empty()) cfg.db_dir = c.db_dir;
    if (c.port != 0) cfg.port = c.port;
    return cfg;
}

KnowledgeBase load_kb(const AppConfig& cfg) {
    KbOptions opts;
    opts.hash_key = effective_hash_key(cfg);
    return KnowledgeBase::load(cfg.db_dir, opts);
}

std::vector<Goal> read_goals(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file);
    json j = json::parse(in);
    std::vector<Goal> goals;
    if (j.is_array()) {
        for (const auto& g : j) goals.push_back(goal_from_json(g.contains("goal") ? g["goal"] : g));
    } else {
        goals.push_back(goal_from_json(j));
    }
    return goals;
}

std::map<std::string, std::vector<TrainingRecord>> group_records(const std::vector<TrainingRecord>& records) {
    std::map<std::string, std::vector<TrainingRecord>> out;
    for (const auto& r : records) out[r.dialogue_id].push_back(r);
    return out;
}

std::unique_ptr<Policy> make_policy(const std::string& kind, const std::string& command,
                                    const std::vector<StepRecord>* steps) {
    if (kind == "baseline") return std::make_unique<BaselinePolicy>();
    if (kind == "process") {
        if (command.empty()) throw Error("--policy process needs --command");
        return std::make_unique<ProcessPolicy>(command);
    }
    if (kind == "playback") {
        if (!steps) throw Error("--policy playback needs --records");
        return std::make_unique<PlaybackPolicy>(PlaybackPolicy::from_steps(*steps));
    }
    throw Error("unknown policy '" + kind + "'");
}

HttpService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"remake: textual-interface task-oriented dialogue toolkit"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_file, "JSON config file");
        sub->add_option("--db", common.db_dir, "directory with <domain>_db.json files");
    };

    auto* serve = app.add_subcommand("serve", "run the HTTP session service");
    add_common(serve);
    serve->add_option("--port", common.port, "listen port");
    std::string console_dir;
    serve->add_option("--console", console_dir, "static console bundle served under /console");

    auto* repl = app.add_subcommand("repl", "operate the interface from the terminal");
    add_common(repl);
    bool no_prompt = false;
    repl->add_flag("--no-prompt", no_prompt, "do not print the > prompt");

    auto* replay = app.add_subcommand("replay", "replay annotated dialogues into training records");
    add_common(replay);
    std::string data_dir, dialogues_file, out_file, report_file;
    unsigned threads = 0;
    replay->add_option("--data", data_dir, "MultiWOZ 2.2 directory");
    replay->add_option("--dialogues", dialogues_file, "native JSON Lines dialogues");
    replay->add_option("--out", out_file, "training records (JSON Lines)")->required();
    replay->add_option("--report", report_file, "consistency report (JSON)");
    replay->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* simulate = app.add_subcommand("simulate", "run a policy against the user simulator or recorded steps");
    add_common(simulate);
    std::string goals_file, policy_kind = "baseline", policy_command, records_file;
    std::uint64_t seed = 0;
    std::size_t max_turns = 20;
    simulate->add_option("--goals", goals_file, "goal JSON (object or array)");
    simulate->add_option("--policy", policy_kind, "baseline | process | playback");
    simulate->add_option("--command", policy_command, "shell command for --policy process");
    simulate->add_option("--records", records_file, "training records for --policy playback");
    simulate->add_option("--seed", seed, "simulator seed");
    simulate->add_option("--max-turns", max_turns, "turn limit per episode");

    auto* eval = app.add_subcommand("eval", "evaluation metrics");
    eval->require_subcommand(1);
    auto* bleu = eval->add_subcommand("bleu", "mean sentence BLEU of line-aligned files");
    std::string hyp_file, ref_file;
    bleu->add_option("--hyp", hyp_file)->required();
    bleu->add_option("--ref", ref_file)->required();

    auto* inform = eval->add_subcommand("informsuccess", "Inform and Success rates");
    add_common(inform);
    std::string corpus_file, responses_file;
    bool fixed = false;
    inform->add_option("--corpus", corpus_file, "evaluation dialogues (JSON Lines)")->required();
    inform->add_option("--responses", responses_file, "JSON object: dialogue id -> list of responses");
    inform->add_flag("--fixed-response", fixed, "also score the fixed placeholder response");

    auto* accuracy = eval->add_subcommand("accuracy", "next-act and search accuracy over training records");
    add_common(accuracy);
    accuracy->add_option("--records", records_file, "training records (JSON Lines)")->required();
    accuracy->add_option("--policy", policy_kind, "baseline | process | playback");
    accuracy->add_option("--command", policy_command, "shell command for --policy process");

    CLI11_PARSE(app, argc, argv);

    try {
        AppConfig cfg = resolve(common);

        if (*serve) {
            if (!console_dir.empty()) cfg.console_dir = console_dir;
            KnowledgeBase kb = load_kb(cfg);
            ServiceOptions so;
            so.interface = cfg.interface;
            so.idle_timeout = cfg.idle_timeout;
            so.ratings_path = cfg.ratings_path;
            SessionStore store(kb, so);
            HttpService service(store, {cfg.console_dir});
            g_service = &service;
            std::signal(SIGINT, [](int) {
                if (g_service) g_service->stop();
            });
            std::cerr << "listening on http://" << cfg.host << ":" << cfg.port << "\n";
            if (!service.listen(cfg.host, cfg.port)) {
                std::cerr << "cannot listen on " << cfg.host << ":" << cfg.port << "\n";
                return 1;
            }
            return 0;
        }

        if (*repl) {
            KnowledgeBase kb = load_kb(cfg);
            run_repl(std::cin, std::cout, kb, cfg.interface, !no_prompt);
            return 0;
        }

        if (*replay) {
            KnowledgeBase kb = load_kb(cfg);
            std::vector<AnnotatedDialogue> dialogues;
            if (!data_dir.empty()) {
                dialogues = load_multiwoz22(data_dir);
            } else if (!dialogues_file.empty()) {
                dialogues = read_dialogues_jsonl(dialogues_file);
            } else {
                throw Error("replay needs --data or --dialogues");
            }
            ReplayOptions ro;
            ro.interface = cfg.interface;
            auto trajectories = replay_corpus(dialogues, kb, ro, threads);
            std::ofstream out(out_file);
            if (!out) throw Error("cannot write " + out_file);
            std::size_t records = 0;
            for (const auto& t : trajectories) {
                if (!t.consistent) continue;
                for (const auto& r : export_training(t)) {
                    out << to_json(r).dump() << "\n";
                    ++records;
                }
            }
            auto report = consistency_report(trajectories);
            if (!report_file.empty()) {
                std::ofstream rep(report_file);
                rep << to_json(report).dump(2) << "\n";
            }
            std::cout << format_table(report) << "\n" << records << " training records written to " << out_file
                      << "\n";
            return 0;
        }

        if (*simulate) {
            KnowledgeBase kb = load_kb(cfg);
            EpisodeOptions eo;
            eo.seed = seed;
            eo.max_turns = max_turns;
            eo.interface = cfg.interface;
            if (policy_kind == "playback") {
                auto groups = group_records(read_training_records(records_file));
                for (const auto& [id, recs] : groups) {
                    auto steps = steps_from_records(recs, kb, {cfg.interface});
                    auto policy = make_policy("playback", "", &steps);
                    auto result = run_playback(steps, *policy, kb, cfg.interface);
                    nlohmann::ordered_json line;
                    line["dialogue_id"] = id;
                    line["steps"] = steps.size();
                    line["contradictions"] = result.contradictions.size();
                    std::cout << line.dump() << "\n";
                }
                return 0;
            }
            if (goals_file.empty()) throw Error("simulate needs --goals");
            auto policy = make_policy(policy_kind, policy_command, nullptr);
            std::size_t ok = 0;
            auto goals = read_goals(goals_file);
            for (std::size_t i = 0; i < goals.size(); ++i) {
                auto r = run_episode(goals[i], *policy, kb, eo);
                if (r.success) ++ok;
                nlohmann::ordered_json line;
                line["goal"] = i;
                line["success"] = r.success;
                line["turns"] = r.turns;
                line["contradictions"] = r.contradictions.size();
                line["failures"] = r.failures;
                std::cout << line.dump() << "\n";
            }
            std::cout << "success " << ok << "/" << goals.size() << "\n";
            return 0;
        }

        if (*bleu) {
            auto read_lines = [](const std::string& f) {
                std::ifstream in(f);
                if (!in) throw LoadError("cannot open " + f);
                std::vector<std::string> lines;
                for (std::string l; std::getline(in, l);) lines.push_back(l);
                return lines;
            };
            auto h = read_lines(hyp_file);
            auto r = read_lines(ref_file);
            std::printf("BLEU %.4f\n", mean_sentence_bleu(h, r));
            return 0;
        }

        if (*inform) {
            KnowledgeBase kb = load_kb(cfg);
            EvalCorpus corpus = read_eval_corpus(corpus_file);
            if (!responses_file.empty()) {
                std::ifstream in(responses_file);
                auto responses = json::parse(in).get<std::map<std::string, std::vector<std::string>>>();
                corpus = with_responses(corpus, responses);
            }
            if (fixed) {
                auto audit = fixed_response_audit(corpus, kb);
                std::printf("responses       inform %6.2f  success %6.2f\n", audit.original.inform,
                            audit.original.success);
                std::printf("fixed response  inform %6.2f  success %6.2f\n", audit.fixed.inform,
                            audit.fixed.success);
                std::printf("fixed response %s on Success\n", audit.exploitable() ? "matches or beats" : "loses");
            } else {
                auto report = inform_success(corpus, kb);
                std::printf("inform %6.2f  success %6.2f\n", report.inform, report.success);
            }
            return 0;
        }

        if (*accuracy) {
            KnowledgeBase kb = load_kb(cfg);
            auto groups = group_records(read_training_records(records_file));
            std::vector<PolicyDecision> predictions;
            std::vector<GoldStep> gold;
            for (const auto& [id, recs] : groups) {
                auto steps = steps_from_records(recs, kb, {cfg.interface});
                auto policy = make_policy(policy_kind, policy_command, &steps);
                auto result = run_playback(steps, *policy, kb, cfg.interface);
                predictions.insert(predictions.end(), result.predictions.begin(), result.predictions.end());
                for (const auto& r : recs) gold.push_back({r.act, r.target});
            }
            auto report = act_and_search_accuracy(predictions, gold);
            std::printf("next-act %6.2f  search %6.2f  (%zu steps, %zu searches)\n", report.next_act, report.search,
                        report.steps, report.search_steps);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

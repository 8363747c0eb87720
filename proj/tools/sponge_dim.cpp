#include <sponge/report.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assouad and lower dimension bounds for diagonal self-affine sponges"};
  app.require_subcommand(1);
  sponge::CommandOptions opt;
  std::string spec_path, out_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Sponge specification (JSON)")->required();
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", out_path, "Write output to this path instead of stdout");
  };
  auto* validate = app.add_subcommand("validate", "Validate a spec and check separation");
  add_common(validate);
  auto* dims = app.add_subcommand("dims", "Dimension bounds for a self-affine measure");
  add_common(dims);
  dims->add_option("--measure", opt.measure, "given | uniform | natural:<ordering>");
  dims->add_option("--seed", opt.seed, "Sampler seed");
  dims->add_option("--oracle", opt.oracle, "Symbolic oracle mode")->check(CLI::IsMember({"off", "quick", "full"}));
  dims->add_flag("--formula-only", opt.formula_only, "Report formula values without very strong separation");
  auto* gap = app.add_subcommand("gap", "Minimise the Assouad dimension over weights (planar)");
  add_common(gap);
  gap->add_option("--budget", opt.budget, "Refinement evaluations");
  gap->add_option("--seed", opt.seed, "Sampling seed for many-map systems");
  auto* orderings = app.add_subcommand("orderings", "Ordering sets with certificates");
  add_common(orderings);
  auto* render = app.add_subcommand("render", "SVG of depth-k cylinders");
  add_common(render);
  render->add_option("--depth", opt.depth, "Cylinder depth")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  auto text = read_file(spec_path);
  if (!text) {
    std::cerr << "cannot read " << spec_path << "\n";
    return sponge::kExitParse;
  }
  sponge::CommandResult res;
  if (validate->parsed())
    res = sponge::cmd_validate(*text, opt);
  else if (dims->parsed())
    res = sponge::cmd_dims(*text, opt);
  else if (gap->parsed())
    res = sponge::cmd_gap(*text, opt);
  else if (orderings->parsed())
    res = sponge::cmd_orderings(*text, opt);
  else
    res = sponge::cmd_render(*text, opt);

  if (out_path.empty()) {
    std::cout << res.output;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return sponge::kExitParse;
    }
    out << res.output;
  }
  return res.exit_code;
}

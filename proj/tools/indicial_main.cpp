#include "indicial/session.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"indicial: symbolic indicial tensor algebra"};

  std::string script;
  bool repl = false;
  int dimension = 0;
  std::string format = "plain";
  bool trace = false;
  app.add_option("--script", script, "Run the statements in FILE and print the transcript")
      ->check(CLI::ExistingFile);
  app.add_flag("--repl", repl, "Start an interactive session (the default without --script)");
  app.add_option("--dim", dimension, "Fix the dimension, as idim(N) would")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output rendering")
      ->check(CLI::IsMember({"plain", "latex", "json"}));
  app.add_flag("--trace", trace, "Print the steps of each euler_lagrange derivation");
  CLI11_PARSE(app, argc, argv);

  static const std::map<std::string, indicial::Format> formats{
      {"plain", indicial::Format::Plain}, {"latex", indicial::Format::Latex}, {"json", indicial::Format::Json}};
  indicial::Session session({formats.at(format), trace});
  if (dimension > 0) session.context().metric.dimension = dimension;

  int status = 0;
  if (!script.empty()) {
    std::ifstream file(script);
    std::stringstream text;
    text << file.rdbuf();
    status = session.run_script(text.str(), std::cout, std::cerr);
  }
  if (repl || script.empty()) session.repl(std::cin, std::cout);
  return status;
}

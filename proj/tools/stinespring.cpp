#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stinespring/cli.hpp"

namespace cli = stinespring::cli;

int main(int argc, char** argv) {
    CLI::App app{"Construct and verify minimal Stinespring dilations of completely positive tuples "
                 "on Hilbert C*-modules"};
    app.require_subcommand(1);

    cli::GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "write a seeded random valid instance");
    g->add_option("--seed", gen.spec.seed, "random seed")->required();
    g->add_option("--n", gen.spec.n, "number of maps in the tuple")->default_val(1);
    g->add_option("--blocks", gen.spec.block_dims, "algebra block sizes d_b")->delimiter(',')->default_str("1");
    g->add_option("--mults", gen.spec.mults, "module multiplicities k_b")->delimiter(',')->default_str("1");
    g->add_option("--h1", gen.spec.h1, "dimension of H1")->default_val(1);
    g->add_option("--h2", gen.spec.h2, "dimension of H2")->default_val(1);
    g->add_option("--k1-extra", gen.spec.k1_extra, "extra dimension of the auxiliary K1")->default_val(0);
    g->add_option("--k2-extra", gen.spec.k2_extra, "extra unreachable dimension of the auxiliary K2")
        ->default_val(0);
    bool non_unital = false;
    g->add_flag("--non-unital", non_unital, "do not force phi_ii(1) = I");
    g->add_option("-o,--out", gen.out_path, "output file (default: standard output)");

    cli::DilateArgs dil;
    std::uint64_t basis_seed = 0;
    auto* d = app.add_subcommand("dilate", "build the minimal dilation of an instance and verify it");
    d->add_option("instance", dil.instance_path, "instance file")->required();
    d->add_option("-o,--out", dil.out_path, "dilation output file");
    d->add_option("--cutoff", dil.cutoff, "relative eigenvalue cutoff of the Gram quotient")
        ->capture_default_str();
    d->add_option("--tol", dil.tol, "residual tolerance")->capture_default_str();
    auto* bs = d->add_option("--basis-seed", basis_seed, "factor the Gram matrix in a seeded permuted basis");
    d->add_option("--report", dil.report_path, "write the JSON report here");
    d->add_flag("--json", dil.json, "print the JSON report instead of the table");

    cli::VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "check a dilation file against an instance");
    v->add_option("instance", ver.instance_path, "instance file")->required();
    v->add_option("dilation", ver.dilation_path, "dilation file")->required();
    v->add_option("--tol", ver.tol, "residual tolerance")->capture_default_str();
    v->add_option("--report", ver.report_path, "write the JSON report here");
    v->add_flag("--json", ver.json, "print the JSON report instead of the table");

    cli::EquivArgs eq;
    auto* e = app.add_subcommand("equiv", "build the unitaries relating two minimal dilations");
    e->add_option("instance", eq.instance_path, "instance file")->required();
    e->add_option("dilation_a", eq.dilation_a, "first dilation file")->required();
    e->add_option("dilation_b", eq.dilation_b, "second dilation file")->required();
    e->add_option("--tol", eq.tol, "residual tolerance")->capture_default_str();
    e->add_option("--report", eq.report_path, "write the JSON witness here");
    e->add_flag("--json", eq.json, "print the JSON witness instead of the table");

    cli::RotateArgs rot;
    auto* r = app.add_subcommand("rotate", "transport a dilation by seeded random unitaries on K1 and K2");
    r->add_option("dilation", rot.dilation_path, "dilation file")->required();
    r->add_option("--seed", rot.seed, "random seed")->default_val(1);
    r->add_option("-o,--out", rot.out_path, "output file (default: standard output)");

    cli::FuzzArgs fz;
    fz.options.tol = cli::default_tol();
    auto* f = app.add_subcommand("fuzz", "seeded end-to-end property run");
    f->add_option("--trials", fz.options.trials, "number of trials")->capture_default_str();
    f->add_option("--seed", fz.options.seed, "base seed")->capture_default_str();
    f->add_option("--max-n", fz.options.max_n, "largest tuple length")->capture_default_str();
    f->add_option("--max-block", fz.options.max_block, "largest block count and block size")
        ->capture_default_str();
    f->add_option("--max-h", fz.options.max_h, "largest dimension of H1 and H2")->capture_default_str();
    f->add_option("--tol", fz.options.tol, "residual tolerance")->capture_default_str();
    f->add_option("--cutoff", fz.options.cutoff, "relative eigenvalue cutoff")->capture_default_str();
    f->add_option("--report", fz.report_path, "write the JSON report here");
    f->add_flag("--json", fz.json, "print the JSON report instead of the summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : cli::kParse;
    }

    if (g->parsed()) {
        gen.spec.unital = !non_unital;
        return cli::cmd_generate(gen, std::cout, std::cerr);
    }
    if (d->parsed()) {
        if (bs->count() > 0) dil.basis_seed = basis_seed;
        return cli::cmd_dilate(dil, std::cout, std::cerr);
    }
    if (v->parsed()) return cli::cmd_verify(ver, std::cout, std::cerr);
    if (e->parsed()) return cli::cmd_equiv(eq, std::cout, std::cerr);
    if (r->parsed()) return cli::cmd_rotate(rot, std::cout, std::cerr);
    if (f->parsed()) return cli::cmd_fuzz(fz, std::cout, std::cerr);
    return cli::kParse;
}

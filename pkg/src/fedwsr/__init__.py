"""fedwsr: federated training of wireless-signal enhancement/recognition nets.

Subpackages:
    signal  — synthetic I/Q dataset generation (modulation, channel, AWGN)
    nncore  — minimal 1-D NN kernel with exact analytic gradients
    models  — ACBlock, WSENet, WSRNet, WSERNet and the joint loss
    fed     — simulated federated orchestration (FedAvg/FedProx/FedProx+)
Top-level modules: metrics, train, config, plots, cli.
"""

__version__ = "0.1.0"

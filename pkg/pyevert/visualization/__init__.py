from .trace_plots import plot_energy_trace, plot_event_timeline, save_plots

__all__ = [
    "plot_energy_trace",
    "plot_event_timeline",
    "save_plots",
]

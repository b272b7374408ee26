# Services Package - Datasets, Training, Diagnostics, Reporting

# Utils Package - Configuration and Logging
